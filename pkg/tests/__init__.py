"""Test suite for npspec."""
