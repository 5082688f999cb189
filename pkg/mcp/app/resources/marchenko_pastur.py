"""
Marchenko-Pastur reference tables exposed via MCP.
"""

import io

from fastmcp import FastMCP
from fastmcp.exceptions import ResourceError

from edgelab.errors import InvalidParameterError
from edgelab.mp import MPParams, mp_quantile, mp_table, mp_total_mass

TABLE_POINTS = 200


class MarchenkoPasturResourceProvider:
    """
    Provider for Marchenko-Pastur law resources.

    Exposes density and distribution tables that LLM clients can plot or
    compare empirical spectra against.
    """

    def __init__(self, mcp: FastMCP):
        self.mcp = mcp
        self.register_resources()

    def register_resources(self):
        """Register law resources."""
        self.mcp.resource(
            "resource://mp/table/{rho}",
            name="Marchenko-Pastur Table",
            description="Density and CDF of the Marchenko-Pastur law on its support, in CSV format",
            mime_type="text/csv",
        )(self.get_table)

        self.mcp.resource(
            "resource://mp/summary/{rho}",
            name="Marchenko-Pastur Summary",
            description="Edges, atom, quartiles and quadrature mass of the Marchenko-Pastur law",
            mime_type="text/markdown",
        )(self.get_summary)

    @staticmethod
    def _law(rho: str) -> MPParams:
        try:
            return MPParams(float(rho))
        except (ValueError, InvalidParameterError) as e:
            raise ResourceError(f"Invalid aspect ratio {rho!r}: {e}")

    def get_table(self, rho: str) -> str:
        """
        Get the law tabulated on Chebyshev nodes of its support.

        Args:
            rho: Aspect ratio n / m

        Returns:
            CSV string with columns x, density, cdf
        """
        law = self._law(rho)
        output = io.StringIO()
        mp_table(law, TABLE_POINTS).to_csv(output, index=False)
        return output.getvalue()

    def get_summary(self, rho: str) -> str:
        """
        Get a markdown summary of the law.

        Returns:
            Markdown string with the edges, the atom at zero, the quartiles
            and the quadrature mass of the continuous part
        """
        law = self._law(rho)
        lines = [
            f"# Marchenko-Pastur law, rho = {law.rho:g}\n",
            f"**Lower edge:** {law.lower_edge:.6g}",
            f"**Upper edge:** {law.upper_edge:.6g}",
            f"**Atom at zero:** {law.atom_mass:.6g}",
            "",
            "## Quartiles",
        ]
        for p in (0.25, 0.5, 0.75):
            lines.append(f"- {p:.2f}: {mp_quantile(law, p):.6g}")
        lines.append("")
        lines.append(f"Continuous mass by quadrature: {mp_total_mass(law):.8f}")
        return "\n".join(lines)
