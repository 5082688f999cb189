"""
Health check routes for the MCP server.
"""

from fastmcp import FastMCP
from starlette.requests import Request
from starlette.responses import JSONResponse

from edgelab import __version__ as edgelab_version

from app import __version__ as server_version
from app.config import settings


def register_health_routes(mcp: FastMCP) -> None:
    """
    Register health check routes.
    """

    @mcp.custom_route("/health", methods=["GET"])
    async def health_check(_request: Request) -> JSONResponse:  # pyright: ignore[reportUnusedFunction]
        """
        Report that the server is up, with the library version it runs
        experiments against and the request limits it enforces.
        """
        return JSONResponse(
            {
                "status": "ok",
                "server": server_version,
                "edgelab": edgelab_version,
                "limits": {
                    "max_dim": settings.max_dim,
                    "max_samples": settings.max_samples,
                    "max_trials": settings.max_trials,
                },
            }
        )
