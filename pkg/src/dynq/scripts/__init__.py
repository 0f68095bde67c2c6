"""Bundled regression scripts, one or more per script kind."""

from importlib import resources


def regression_scripts():
    """Sorted list of (name, text) for every bundled script."""
    root = resources.files(__name__)
    return sorted((p.name, p.read_text(encoding="utf-8")) for p in root.iterdir() if p.name.endswith(".dq"))
