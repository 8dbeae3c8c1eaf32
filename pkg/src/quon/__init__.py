"""Quon algebra toolkit."""
