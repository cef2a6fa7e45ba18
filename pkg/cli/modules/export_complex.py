# cli/modules/export_complex.py
"""
The ``export-complex`` subcommand: plain-text listing of a building.
"""

from typing import Optional

from core.building import export_boundary, export_complex, tits_complex
from core.errors import InvalidInputError
from core.groups import FormSpec, normalize_family


def cmd_export_complex(family: str, n: int, p: int, boundary: Optional[int] = None,
                       capacity: Optional[int] = None) -> str:
    """Simplex listing, or the ``row col value`` triplets of one boundary map."""
    form = FormSpec.for_family(normalize_family(family), n, p)
    complex_ = tits_complex(form, capacity=capacity)
    if boundary is None:
        return export_complex(complex_)
    if not 0 <= boundary <= complex_.top_dim:
        raise InvalidInputError(f"boundary degree {boundary} outside 0..{complex_.top_dim}")
    lines = [f"# boundary {boundary} of {form.family} n={n} p={p}"]
    lines.extend(f"{r} {c} {v}" for r, c, v in export_boundary(complex_, boundary))
    return "\n".join(lines) + "\n"
