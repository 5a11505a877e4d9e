"""Maintenance scripts; importable so tests can regenerate fixtures in place."""
