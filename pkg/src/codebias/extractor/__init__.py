"""Decision-influence extraction from generated code.

Primary mode is a static parse-and-dataflow analysis; a judge-prompt mode is
available for cross-checking against an LLM extractor over replay fixtures.
"""

from .dataflow import (
    Evidence,
    InfluenceReport,
    ParseResult,
    SinkConfig,
    influenced_attributes,
    parse_program,
)
from .judge import llm_extract, render_judge_prompt
from .labels import SampleBiasLabel, classify_sample

__all__ = [
    "Evidence",
    "InfluenceReport",
    "ParseResult",
    "SampleBiasLabel",
    "SinkConfig",
    "classify_sample",
    "influenced_attributes",
    "llm_extract",
    "parse_program",
    "render_judge_prompt",
]
