"""Application versioning utility for the RF canceller simulator.

This module provides a helper to retrieve the installed package version, using the
package name defined in pyproject.toml. The version is echoed into every scenario
report.
"""

from importlib.metadata import PackageNotFoundError, version

PKG_NAME = "rf-canceller-sim"  # matches pyproject.toml


def get_app_version() -> str:
    """Get the installed version string of the simulator.

    Returns:
        str: The version string, or "0.0.0+unknown" if the package is not installed.
    """
    try:
        return version(PKG_NAME)
    except PackageNotFoundError:
        return "0.0.0+unknown"
