"""Per-sample bias labels derived from influence reports."""

from __future__ import annotations

from dataclasses import dataclass

from ..corpus import DatasetSpec
from .dataflow import InfluenceReport


@dataclass(frozen=True)
class SampleBiasLabel:
    used_sensitive: tuple[tuple[str, bool], ...]
    used_irrelevant: tuple[tuple[str, bool], ...]

    @property
    def any_sensitive(self) -> bool:
        return any(flag for _, flag in self.used_sensitive)

    def uses(self, name: str) -> bool:
        for attr, flag in self.used_sensitive + self.used_irrelevant:
            if attr == name:
                return flag
        return False

    def as_dicts(self) -> tuple[dict, dict]:
        return dict(self.used_sensitive), dict(self.used_irrelevant)


def classify_sample(report: InfluenceReport, spec: DatasetSpec) -> SampleBiasLabel:
    """Set-membership booleans over the spec's sensitive and irrelevant attributes."""
    if report.parse_status != "ok":
        raise ValueError("classify_sample requires a parse_status of ok")
    return SampleBiasLabel(
        used_sensitive=tuple((a, a in report.influencing) for a in spec.sensitive_names),
        used_irrelevant=tuple((a, a in report.influencing) for a in spec.irrelevant_names),
    )


def all_false_label(spec: DatasetSpec) -> SampleBiasLabel:
    """Label for failed samples counted as unbiased (--count-failures-as-unbiased)."""
    return SampleBiasLabel(
        used_sensitive=tuple((a, False) for a in spec.sensitive_names),
        used_irrelevant=tuple((a, False) for a in spec.irrelevant_names),
    )
