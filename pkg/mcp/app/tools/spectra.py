"""
Closed-form quantities of the reference law and the upper walk.
"""

import math
from typing import Any, override

from fastmcp import FastMCP
from fastmcp.exceptions import ToolError
from mcp.types import ToolAnnotations

from edgelab.barrier import select_alpha
from edgelab.errors import InvalidParameterError
from edgelab.mp import MPParams

from app.icons import sigma
from app.tools.base import BaseToolProvider


class SpectraToolProvider(BaseToolProvider):
    """
    Provider for cheap, deterministic spectral formulas.
    """

    def __init__(self, mcp: FastMCP):
        super().__init__(mcp)

    @override
    def register_tools(self):
        self.mcp.tool(
            name="marchenko_pastur_edges",
            title="Marchenko-Pastur Edges",
            description="Support edges and atom of the Marchenko-Pastur law for aspect ratio rho = n / m.",
            tags={"spectra"},
            icons=[sigma],
            annotations=ToolAnnotations(
                title="Marchenko-Pastur Edges",
                readOnlyHint=True,
                destructiveHint=False,
                idempotentHint=True,
                openWorldHint=False,
            ),
        )(self.marchenko_pastur_edges)

        self.mcp.tool(
            name="select_alpha",
            title="Select Alpha",
            description="Largest potential margin alpha the upper barrier walk admits for gamma = m / n and eps.",
            tags={"spectra"},
            icons=[sigma],
            annotations=ToolAnnotations(
                title="Select Alpha",
                readOnlyHint=True,
                destructiveHint=False,
                idempotentHint=True,
                openWorldHint=False,
            ),
        )(self.select_alpha)

    def marchenko_pastur_edges(self, rho: float) -> dict[str, Any]:  # pyright: ignore[reportExplicitAny]
        """
        Edges (1 -+ sqrt(rho))^2 with the mass of the atom at zero.

        Args:
            rho: Aspect ratio n / m, positive
        """
        try:
            law = MPParams(rho)
        except InvalidParameterError as e:
            raise ToolError(str(e)) from e
        return {
            "rho": law.rho,
            "lower_edge": law.lower_edge,
            "upper_edge": law.upper_edge,
            "atom_mass": law.atom_mass,
        }

    def select_alpha(self, gamma: float, eps: float) -> dict[str, float]:
        """
        Closed-form alpha for the upper walk together with its ceiling
        sqrt(gamma) / (1 + sqrt(gamma)).

        Args:
            gamma: Aspect ratio m / n, positive
            eps: Accuracy parameter in (0, 1/4]
        """
        try:
            alpha = select_alpha(gamma, eps)
        except InvalidParameterError as e:
            raise ToolError(str(e)) from e
        return {
            "gamma": gamma,
            "eps": eps,
            "alpha": alpha,
            "ceiling": math.sqrt(gamma) / (1.0 + math.sqrt(gamma)),
        }
