"""Exponential-polynomial models, sampling sets and recovery."""
