"""Chat-model client contract with record/replay transcripts.

The pipeline never runs a language model in-process.  A client is
anything with chat(system, user, exemplars) -> response text.  Live
conversations are recorded verbatim to JSON transcripts; replaying a
transcript makes parser behavior reproducible in tests without network
access.  Exemplars are (user, assistant) pairs prepended as few-shot
context by clients that support it.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from ..errors import ConfigurationError, DataError, FormatError


@dataclass(frozen=True)
class ChatExchange:
    system: str
    user: str
    response: str


@dataclass
class Transcript:
    exchanges: list[ChatExchange] = field(default_factory=list)

    @classmethod
    def load(cls, path: str) -> "Transcript":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FormatError(f"unreadable transcript {path}: {exc}") from exc
        try:
            return cls([ChatExchange(**e) for e in doc])
        except TypeError as exc:
            raise FormatError(f"transcript {path} missing fields: {exc}") from exc

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(
                [e.__dict__ for e in self.exchanges], fh, indent=2, sort_keys=True
            )
            fh.write("\n")


class ReplayChatClient:
    """Serves recorded responses keyed by (system, user)."""

    def __init__(self, transcript: Transcript):
        self._byprompt = {(e.system, e.user): e.response for e in transcript.exchanges}

    def chat(self, system: str, user: str, exemplars=()) -> str:
        key = (system, user)
        if key not in self._byprompt:
            raise DataError(f"transcript has no response for user prompt {user!r}")
        return self._byprompt[key]


class RecordingChatClient:
    """Wraps a live client and appends every exchange to a transcript."""

    def __init__(self, inner, transcript: Transcript = None):
        self.inner = inner
        self.transcript = transcript if transcript is not None else Transcript()

    def chat(self, system: str, user: str, exemplars=()) -> str:
        response = self.inner.chat(system, user, exemplars)
        self.transcript.exchanges.append(ChatExchange(system, user, response))
        return response


class HttpChatClient:
    """Minimal chat-completions client over HTTP.

    Endpoint and key come from CILKIT_LLM_ENDPOINT / CILKIT_LLM_API_KEY;
    the optional model name from CILKIT_LLM_MODEL.  Speaks the common
    chat-completions JSON shape: messages in, choices[0].message.content
    out.
    """

    def __init__(self, endpoint: str = None, api_key: str = None,
                 model: str = None, timeout: float = 120.0):
        self.endpoint = endpoint or os.environ.get("CILKIT_LLM_ENDPOINT")
        self.api_key = api_key or os.environ.get("CILKIT_LLM_API_KEY")
        self.model = model or os.environ.get("CILKIT_LLM_MODEL", "")
        self.timeout = timeout
        if not self.endpoint:
            raise ConfigurationError("no chat endpoint; set CILKIT_LLM_ENDPOINT")

    def chat(self, system: str, user: str, exemplars=()) -> str:
        import requests

        messages = [{"role": "system", "content": system}]
        for ex_user, ex_assistant in exemplars:
            messages.append({"role": "user", "content": ex_user})
            messages.append({"role": "assistant", "content": ex_assistant})
        messages.append({"role": "user", "content": user})
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {"messages": messages}
        if self.model:
            body["model"] = self.model
        try:
            resp = requests.post(
                self.endpoint, json=body, headers=headers, timeout=self.timeout
            )
        except requests.RequestException as exc:
            raise DataError(f"chat request failed: {exc}") from exc
        if resp.status_code != 200:
            raise DataError(f"chat endpoint returned HTTP {resp.status_code}")
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise FormatError(f"unexpected chat response shape: {exc}") from exc
