"""
Custom HTTP routes served next to the MCP endpoint.
"""

from fastmcp import FastMCP

__all__ = ["register_routes"]


def register_routes(mcp: FastMCP) -> None:
    """Register the /health route."""
    from app.routes.health import register_health_routes

    register_health_routes(mcp)
