"""Test package for magnon-entangle."""
