"""Test suite for mlbgg."""
