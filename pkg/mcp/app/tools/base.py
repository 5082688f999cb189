"""
Base classes for tool providers.
"""

from abc import ABC, abstractmethod
from collections.abc import Sequence

from fastmcp import FastMCP
from fastmcp.exceptions import ToolError

from app.config import settings


class BaseToolProvider(ABC):
    """Base class for tool providers."""

    def __init__(self, mcp: FastMCP):
        self.mcp = mcp
        self.register_tools()

    @abstractmethod
    def register_tools(self):
        """
        Register this provider's tools with the MCP server.

        Subclasses should implement this method to register their tools
        using self.mcp.tool(self.method_name).
        """
        pass

    @staticmethod
    def check_limits(
        n: int | None = None,
        m: int | None = None,
        trials: int | None = None,
        *,
        n_grid: Sequence[int] = (),
        rho: float | None = None,
    ) -> None:
        """
        Reject requests beyond the configured server limits.

        Every dimension in ``n_grid`` counts against the dimension limit,
        and with ``rho`` so does the sample count round(n / rho) it implies.

        Raises:
            ToolError: If a dimension, sample count or trials exceeds its limit
        """
        largest = max((d for d in (n, *n_grid) if d is not None), default=None)
        samples = [s for s in (m,) if s is not None]
        if rho is not None and n_grid:
            samples.append(max(1, round(max(n_grid) / rho)))
        limits = (
            ("n", largest, settings.max_dim),
            ("m", max(samples, default=None), settings.max_samples),
            ("trials", trials, settings.max_trials),
        )
        for name, value, limit in limits:
            if value is not None and value > limit:
                raise ToolError(f"{name}={value} exceeds the server limit of {limit}")
