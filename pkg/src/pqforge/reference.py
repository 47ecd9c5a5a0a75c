"""Externally published NIST level-I parameter comparison, stored as data."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError

SOURCE_LABEL = "reported"
PERCENT_TOLERANCE_PP = 0.1


@dataclass(frozen=True)
class ReferenceRow:
    scheme: str
    parameter: str
    unit: str
    original: float
    optimized: float
    reduction_percent: float

    @property
    def recomputed_percent(self) -> float:
        return 100.0 * (self.original - self.optimized) / self.original

    @property
    def discrepancy_pp(self) -> float:
        return abs(self.recomputed_percent - self.reduction_percent)


@dataclass(frozen=True)
class ReferenceTable:
    rows: tuple[ReferenceRow, ...]
    tolerance_pp: float = PERCENT_TOLERANCE_PP

    def __post_init__(self) -> None:
        for row in self.rows:
            if row.discrepancy_pp > self.tolerance_pp:
                raise ValidationError(
                    f"{row.scheme} {row.parameter}: stored {row.reduction_percent}% vs "
                    f"recomputed {row.recomputed_percent:.3f}%")

    def find(self, scheme: str, parameter: str) -> ReferenceRow:
        for row in self.rows:
            if row.scheme == scheme and row.parameter == parameter:
                return row
        raise KeyError((scheme, parameter))


REPORTED_PARAMS = ReferenceTable((
    ReferenceRow("SPHINCS+", "hash_size", "bits", 256, 214, 16.4),
    ReferenceRow("SPHINCS+", "signature_size", "KB", 8.0, 6.7, 16.3),
    ReferenceRow("NTRU", "dimension_N", "", 701, 634, 9.6),
    ReferenceRow("NTRU", "modulus_q", "", 8192, 6144, 25.0),
))

# Headline figures quoted beside the table. The key size has no derivation and
# no computed counterpart; the signature figure is paired with the hash-size
# percentage rather than the signature-size one.
HEADLINE = {
    "ntru_key_size_kb": {"value": 1.1, "reduction_percent": 9.6},
    "sphincs_signature_kb": {"value": 6.7, "reduction_percent": 16.4},
}

# Parameters used when evaluating the optimized rows.
REPORTED_LAMBDA = 128
REPORTED_NTRU_SIGMA = 1.5
REPORTED_HQ_BITS = 380.0
REPORTED_HQ_COMPLEXITY_LOG2 = 190.0
