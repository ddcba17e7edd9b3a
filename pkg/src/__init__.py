"""Application package root."""
