"""Wideband self-adaptive RF self-interference canceller simulator.

The numeric stages live in ``utils`` and their configuration models in ``models``;
this package carries the version helper and the bundled scenario definitions
(``rf_canceller_sim/scenarios/*.json``).
"""

from .versioning import get_app_version

__all__ = ["get_app_version"]
