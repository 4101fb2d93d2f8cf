"""Driving an external text-to-image service over a generation manifest.

The client is anything with submit(prompt, seed, params) -> PNG bytes
that raises GenerationFailure on a failed attempt.  Jobs are idempotent
by job_key: outputs land at manifest-recorded paths, and a resumed run
submits only jobs whose outputs are missing.  Failures retry with
exponential backoff up to a budget; a job that exhausts its budget is
recorded as failed without stopping the run.
"""

from __future__ import annotations

import json
import os
import struct
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

from ..errors import ConfigurationError, PipelineError
from .manifest import GenerationJob, GenerationManifest


class GenerationFailure(Exception):
    """One failed submit attempt; the driver decides whether to retry."""


@dataclass(frozen=True)
class JobParams:
    image_size: int
    inference_steps: int
    guidance_scale: float


@dataclass
class JobResult:
    job_key: str
    status: str  # complete | skipped | failed
    attempts: int
    error: str = ""


@dataclass
class GenerationReport:
    results: list[JobResult] = field(default_factory=list)

    def count(self, status: str) -> int:
        return sum(1 for r in self.results if r.status == status)

    @property
    def all_failed(self) -> bool:
        return bool(self.results) and self.count("failed") == len(self.results)


def _run_one(job: GenerationJob, client, output_root, retries, backoff, sleep):
    path = os.path.join(output_root, job.output_path)
    if os.path.exists(path):
        return JobResult(job.job_key, "skipped", 0)
    params = JobParams(job.image_size, job.inference_steps, job.guidance_scale)
    last_error = ""
    for attempt in range(1, retries + 2):  # first try plus `retries` retries
        try:
            payload = client.submit(job.prompt, job.seed, params)
        except GenerationFailure as exc:
            last_error = str(exc)
            if attempt <= retries:
                sleep(backoff * 2.0 ** (attempt - 1))
            continue
        os.makedirs(os.path.dirname(path), exist_ok=True)
        tmp = f"{path}.part"
        with open(tmp, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
        return JobResult(job.job_key, "complete", attempt)
    return JobResult(job.job_key, "failed", retries + 1, error=last_error)


def run_generation(
    manifest: GenerationManifest,
    client,
    output_root: str,
    retries: int = 3,
    backoff_seconds: float = 1.0,
    parallelism: int = 1,
    sleep=time.sleep,
) -> GenerationReport:
    """Attempt every manifest job; resume-safe and retry-bounded."""
    if parallelism < 1:
        raise ConfigurationError("parallelism must be positive")
    if retries < 0:
        raise ConfigurationError("retry budget must be non-negative")
    os.makedirs(output_root, exist_ok=True)
    report = GenerationReport()
    if parallelism == 1:
        for job in manifest.jobs:
            report.results.append(
                _run_one(job, client, output_root, retries, backoff_seconds, sleep)
            )
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            futures = [
                pool.submit(
                    _run_one, job, client, output_root, retries,
                    backoff_seconds, sleep,
                )
                for job in manifest.jobs
            ]
            report.results = [f.result() for f in futures]
    if report.all_failed:
        raise PipelineError("every generation job failed")
    return report


def save_report(report: GenerationReport, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([asdict(r) for r in report.results], fh, indent=2)
        fh.write("\n")


def png_bytes(width: int, height: int, rgb: tuple[int, int, int]) -> bytes:
    """Minimal solid-color PNG, for mock clients and demos."""

    def chunk(tag: bytes, body: bytes) -> bytes:
        return (
            struct.pack(">I", len(body)) + tag + body
            + struct.pack(">I", zlib.crc32(tag + body) & 0xFFFFFFFF)
        )

    header = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    row = b"\x00" + bytes(rgb) * width
    body = zlib.compress(row * height)
    return (
        b"\x89PNG\r\n\x1a\n"
        + chunk(b"IHDR", header)
        + chunk(b"IDAT", body)
        + chunk(b"IEND", b"")
    )


class SolidColorImageClient:
    """Offline stand-in client: deterministic color from the job seed."""

    def submit(self, prompt: str, seed: int, params: JobParams) -> bytes:
        rgb = (seed & 0xFF, (seed >> 8) & 0xFF, (seed >> 16) & 0xFF)
        return png_bytes(params.image_size, params.image_size, rgb)


class HttpImageClient:
    """POSTs one JSON request per image to a user-supplied endpoint.

    Endpoint and key come from CILKIT_T2I_ENDPOINT / CILKIT_T2I_API_KEY.
    The service is expected to return raw image bytes on HTTP 200; any
    other outcome is a GenerationFailure so the driver's retry policy
    applies uniformly.
    """

    def __init__(self, endpoint: str = None, api_key: str = None,
                 timeout: float = 120.0):
        self.endpoint = endpoint or os.environ.get("CILKIT_T2I_ENDPOINT")
        self.api_key = api_key or os.environ.get("CILKIT_T2I_API_KEY")
        self.timeout = timeout
        if not self.endpoint:
            raise ConfigurationError(
                "no image endpoint; set CILKIT_T2I_ENDPOINT"
            )

    def submit(self, prompt: str, seed: int, params: JobParams) -> bytes:
        import requests

        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            resp = requests.post(
                self.endpoint,
                json={
                    "prompt": prompt,
                    "seed": seed,
                    "width": params.image_size,
                    "height": params.image_size,
                    "num_inference_steps": params.inference_steps,
                    "guidance_scale": params.guidance_scale,
                },
                headers=headers,
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise GenerationFailure(f"request error: {exc}") from exc
        if resp.status_code != 200:
            raise GenerationFailure(f"HTTP {resp.status_code}")
        return resp.content
