from .client import (
    EndpointConfig,
    HttpChatTransport,
    RecordingTransport,
    ReplayTransport,
    transcript_key,
)
from .datasets import load_dataset
from .retrieval import retrieve_passages, split_passages
from .runner import (
    ARTIFACT_SCHEMA_VERSION,
    ExplanationRecord,
    RunArtifact,
    RunConfig,
    RunSummary,
    execute_plan,
    extract_answer,
    load_artifact,
    run,
)

__all__ = [
    "ARTIFACT_SCHEMA_VERSION",
    "EndpointConfig",
    "ExplanationRecord",
    "HttpChatTransport",
    "RecordingTransport",
    "ReplayTransport",
    "RunArtifact",
    "RunConfig",
    "RunSummary",
    "execute_plan",
    "extract_answer",
    "load_artifact",
    "load_dataset",
    "retrieve_passages",
    "run",
    "split_passages",
    "transcript_key",
]
