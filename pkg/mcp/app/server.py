"""
FastMCP server instance and configuration.
"""

from fastmcp import FastMCP


def create_server() -> FastMCP:
    """
    Create and configure the FastMCP server instance.

    Returns:
        FastMCP: Server with the experiment tools, spectra tools and
        Marchenko-Pastur resources registered
    """
    mcp = FastMCP(
        name="edgelab",
        instructions=(
            "Runs barrier walks and Monte Carlo experiments on the extreme eigenvalues "
            "of sample covariance matrices. Results are seeded and reproducible."
        ),
        include_fastmcp_meta=False,
    )

    from app.tools import register_tools
    from app.routes import register_routes
    from app.resources import register_resources

    register_tools(mcp)
    register_routes(mcp)
    register_resources(mcp)

    return mcp
