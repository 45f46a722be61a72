"""Audit trail and CSV/JSON output writers."""
