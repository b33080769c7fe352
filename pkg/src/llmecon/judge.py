"""Judge clients: a deterministic offline mock and a JSON-over-HTTP remote.

Every judge answers three questions: is a candidate answer correct against a
reference, which words of a text are unusual, and what QA pairs (with a 0-4
quality score) can be generated from a chunk of text.

The mock is rule-driven and fully deterministic so the whole test suite runs
offline.  The remote client speaks a chat-completion wire format, reads its
endpoint, model and credentials from the environment, retries with bounded
exponential backoff, and appends raw transcripts to an audit log.
"""

from __future__ import annotations

import json
import os
import re
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Optional, Protocol

import requests

from .errors import ConfigError, TransportError

ENV_ENDPOINT = "JUDGE_ENDPOINT"
ENV_API_KEY = "JUDGE_API_KEY"
ENV_MODEL = "JUDGE_MODEL"

PROMPT_VERSIONS = {
    "correctness": "correctness_v1.txt",
    "oddness": "oddness_v1.txt",
    "qa_generation": "qa_generation_v1.txt",
}


@dataclass(frozen=True)
class GeneratedQa:
    """One generated question-answer pair with its quality score (0-4)."""

    question: str
    answer: str
    quality: int


class JudgeClient(Protocol):
    def judge_correct(self, question: str, reference_answer: str, candidate_answer: str) -> bool: ...

    def odd_words(self, text: str) -> list[str]: ...

    def generate_qa(self, chunk_text: str) -> list[GeneratedQa]: ...


def load_prompt(name: str) -> str:
    """Load a versioned prompt asset by role name ('correctness', ...)."""
    try:
        filename = PROMPT_VERSIONS[name]
    except KeyError:
        raise ConfigError(f"unknown prompt: {name!r}") from None
    return resources.files("llmecon.prompts").joinpath(filename).read_text(encoding="utf-8")


class MockJudge:
    """Deterministic rule-driven judge for offline runs and tests.

    Correctness is exact match after stripping surrounding whitespace; odd
    words are those matching ``odd_pattern`` (default: containing a digit);
    QA generation emits one templated pair per chunk at quality 4.
    """

    def __init__(self, odd_pattern: str = r"\d", qa_quality: int = 4):
        self._odd = re.compile(odd_pattern)
        self._qa_quality = qa_quality

    def judge_correct(self, question: str, reference_answer: str, candidate_answer: str) -> bool:
        return reference_answer.strip() == candidate_answer.strip()

    def odd_words(self, text: str) -> list[str]:
        seen = []
        for word in text.split():
            if self._odd.search(word) and word not in seen:
                seen.append(word)
        return seen

    def generate_qa(self, chunk_text: str) -> list[GeneratedQa]:
        words = chunk_text.split()
        if not words:
            return []
        topic = " ".join(words[:5])
        first_sentence = re.split(r"(?<=[.!?])\s", chunk_text.strip(), maxsplit=1)[0]
        return [
            GeneratedQa(
                question=f"What does the passage beginning {topic!r} state?",
                answer=first_sentence,
                quality=self._qa_quality,
            )
        ]


class RemoteJudge:
    """Chat-completion client with retries and an append-only transcript log.

    Endpoint, model and API key come from the constructor or the
    JUDGE_ENDPOINT / JUDGE_MODEL / JUDGE_API_KEY environment variables.
    Each call makes at most ``max_attempts`` requests with exponential
    backoff; a final failure raises TransportError carrying the attempt
    count.
    """

    def __init__(
        self,
        endpoint: Optional[str] = None,
        model: Optional[str] = None,
        api_key: Optional[str] = None,
        timeout: float = 30.0,
        max_attempts: int = 3,
        backoff_base: float = 0.5,
        transcript_path: Optional[Path] = None,
        session: Optional[requests.Session] = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.endpoint = endpoint or os.environ.get(ENV_ENDPOINT)
        self.model = model or os.environ.get(ENV_MODEL)
        self.api_key = api_key or os.environ.get(ENV_API_KEY)
        if not self.endpoint:
            raise ConfigError(f"remote judge needs an endpoint ({ENV_ENDPOINT})")
        if not self.model:
            raise ConfigError(f"remote judge needs a model name ({ENV_MODEL})")
        self.timeout = timeout
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base
        self.transcript_path = Path(transcript_path) if transcript_path else None
        self.session = session or requests.Session()
        self._sleep = sleep

    # -- wire plumbing ------------------------------------------------------

    def _complete(self, prompt: str) -> str:
        body = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        last_error: Optional[Exception] = None
        for attempt in range(1, self.max_attempts + 1):
            try:
                response = self.session.post(
                    self.endpoint, json=body, headers=headers, timeout=self.timeout
                )
                response.raise_for_status()
                payload = response.json()
                content = payload["choices"][0]["message"]["content"]
                self._log_transcript(prompt, content, attempt)
                return content
            except Exception as exc:  # noqa: BLE001 - any transport failure retries
                last_error = exc
                if attempt < self.max_attempts:
                    self._sleep(self.backoff_base * 2 ** (attempt - 1))
        raise TransportError(
            f"judge call failed after {self.max_attempts} attempts: {last_error}",
            attempts=self.max_attempts,
        )

    def _log_transcript(self, prompt: str, response: str, attempts: int) -> None:
        if self.transcript_path is None:
            return
        record = {
            "ts": time.time(),
            "model": self.model,
            "prompt": prompt,
            "response": response,
            "attempts": attempts,
        }
        with self.transcript_path.open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(record, sort_keys=True) + "\n")

    @staticmethod
    def _parse_json_payload(content: str):
        """Extract the first JSON array from a completion, tolerating prose."""
        match = re.search(r"\[.*\]", content, re.DOTALL)
        if not match:
            raise TransportError(f"judge returned no JSON array: {content[:200]!r}")
        try:
            return json.loads(match.group(0))
        except json.JSONDecodeError as exc:
            raise TransportError(f"judge returned malformed JSON: {exc}") from exc

    # -- judge interface ----------------------------------------------------

    def judge_correct(self, question: str, reference_answer: str, candidate_answer: str) -> bool:
        prompt = load_prompt("correctness").format(
            question=question,
            reference_answer=reference_answer,
            candidate_answer=candidate_answer,
        )
        verdict = self._complete(prompt).strip().lower()
        return verdict.startswith("yes")

    def odd_words(self, text: str) -> list[str]:
        prompt = load_prompt("oddness").format(text=text)
        payload = self._parse_json_payload(self._complete(prompt))
        return [str(word) for word in payload]

    def generate_qa(self, chunk_text: str) -> list[GeneratedQa]:
        prompt = load_prompt("qa_generation").format(chunk_text=chunk_text)
        payload = self._parse_json_payload(self._complete(prompt))
        pairs = []
        for item in payload:
            try:
                pairs.append(
                    GeneratedQa(
                        question=str(item["question"]),
                        answer=str(item["answer"]),
                        quality=int(item["quality"]),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise TransportError(f"judge returned a malformed QA item: {item!r}") from exc
        return pairs
