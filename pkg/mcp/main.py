"""
edgelab MCP server - Entry Point
"""

from edgelab.config import LogLevel
from edgelab.log import configure_logging

from app.server import create_server
from app.config import settings


def main():
    """Run the MCP server over HTTP."""
    configure_logging(LogLevel(settings.log_level.value))
    mcp = create_server()
    mcp.run(transport="http", port=settings.port, host=settings.host)


if __name__ == "__main__":
    main()
