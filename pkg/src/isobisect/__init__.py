"""Isomorphic bisections of cubic graphs."""
