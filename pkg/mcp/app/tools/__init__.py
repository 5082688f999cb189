"""
Tools: experiment runs, barrier walk summaries and closed-form spectral helpers.
"""

from fastmcp import FastMCP

__all__ = ["register_tools"]


def register_tools(mcp: FastMCP) -> None:
    """Register the experiment and spectra tool providers."""
    from app.tools.experiments import ExperimentToolProvider
    from app.tools.spectra import SpectraToolProvider

    ExperimentToolProvider(mcp)
    SpectraToolProvider(mcp)
