import sys

from prony2d.main import main

if __name__ == "__main__":
    sys.exit(main())
