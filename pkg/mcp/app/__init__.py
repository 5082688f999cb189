"""
edgelab MCP server.

Exposes the edgelab experiments, walks and reference law to MCP clients.
"""

__version__ = "0.1.0"
