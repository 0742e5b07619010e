"""Access to knowledge bases shipped inside the package."""

from __future__ import annotations

from importlib import resources

from .kblang import KnowledgeBase, parse_kb
from .network import Network

#: Names accepted by :func:`bundled_kb` (without the ``.mu`` extension).
BUNDLED_NAMES = ("chest-pain",)


def bundled_text(name: str = "chest-pain") -> str:
    """Raw text of a bundled knowledge base."""
    if name not in BUNDLED_NAMES:
        raise KeyError(f"no bundled knowledge base named {name!r}")
    return (
        resources.files("mu").joinpath("kbs").joinpath(f"{name}.mu").read_text("utf-8")
    )


def bundled_kb(name: str = "chest-pain") -> KnowledgeBase:
    """Parsed document for a bundled knowledge base."""
    return parse_kb(bundled_text(name), filename=f"bundled:{name}.mu")


def bundled_network(name: str = "chest-pain") -> Network:
    """Validated, ready-to-use network for a bundled knowledge base."""
    return bundled_kb(name).build()
