"""
Read-only resources: Marchenko-Pastur reference tables and summaries.
"""

from fastmcp import FastMCP

__all__ = ["register_resources"]


def register_resources(mcp: FastMCP) -> None:
    """Register the resource://mp/... templates."""
    from app.resources.marchenko_pastur import MarchenkoPasturResourceProvider

    MarchenkoPasturResourceProvider(mcp)
