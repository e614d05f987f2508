"""Pluggable simplification backends behind one batch interface.

Neural simplifiers stay out of the core: they attach as a child process
speaking one JSON object per line ("proc") or as an HTTP service ("http").
A deterministic rule simplifier and an identity backend ("echo") exist so
the pipeline is fully testable offline.

Proc wire protocol, bit-exact:
  - parent launches the child from the spec's command line;
  - child prints a single line ``READY`` before anything else;
  - parent writes ``{"id": k, "text": ...}`` per request line on child stdin;
  - child answers one ``{"id": k, "text": ...}`` object per line (any order,
    ids must match), optionally with an ``"error"`` key for per-text failures;
  - parent closes stdin to terminate; child must exit 0.
"""

from __future__ import annotations

import json
import logging
import queue
import re
import shlex
import subprocess
import threading
import urllib.error
import urllib.request
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path

log = logging.getLogger(__name__)

DEFAULT_BATCH_SIZE = 32
DEFAULT_TIMEOUT = 60.0

BACKEND_KINDS = ("echo", "rules", "proc", "http")


class BackendError(RuntimeError):
    """Startup, transport, or protocol failure that invalidates the whole batch."""


@dataclass(frozen=True)
class BackendSpec:
    """How to reach a simplifier: kind plus locator (command, URL, or lexicon path)."""

    kind: str
    locator: str = ""
    batch_size: int = DEFAULT_BATCH_SIZE
    timeout: float = DEFAULT_TIMEOUT

    def __post_init__(self) -> None:
        if self.kind not in BACKEND_KINDS:
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if self.kind in ("proc", "http") and not self.locator:
            raise ValueError(f"{self.kind} backend needs a locator")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")


def parse_backend_spec(
    spec: str,
    batch_size: int = DEFAULT_BATCH_SIZE,
    timeout: float = DEFAULT_TIMEOUT,
) -> BackendSpec:
    """Parse the string form: "echo", "rules:LEXICON", "proc:CMD", or "http:URL"."""
    spec = spec.strip()
    if spec == "echo":
        return BackendSpec("echo", batch_size=batch_size, timeout=timeout)
    kind, sep, locator = spec.partition(":")
    if not sep or kind not in BACKEND_KINDS:
        raise ValueError(
            f"bad backend spec {spec!r}; expected echo, rules:LEXICON, proc:CMD, or http:URL"
        )
    return BackendSpec(kind, locator, batch_size=batch_size, timeout=timeout)


@dataclass(frozen=True)
class SimplifyOutcome:
    """Result for one input text; on error the original text is carried through."""

    original: str
    simplified: str
    backend_id: str
    changed: bool
    error: str | None = None


class Backend(ABC):
    """One simplification engine processing batches of texts in order."""

    backend_id = "?"
    batch_size = DEFAULT_BATCH_SIZE

    @abstractmethod
    def process(self, texts: list[str]) -> list[tuple[str, str | None]]:
        """Return one (simplified, error) pair per input, in input order.

        Raise BackendError for failures that invalidate the whole batch.
        """

    def close(self) -> int | None:
        """Release resources; returns the child exit status where that exists."""
        return None

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()


def _squash(text: str) -> str:
    return " ".join(text.split())


def simplify_batch(backend: Backend, texts: list[str]) -> list[SimplifyOutcome]:
    """Simplify ``texts`` through ``backend``; outcome k corresponds to input k.

    Inputs must be non-empty after trimming. Internal newlines are replaced by
    single spaces before dispatch. Per-text failures come back as outcomes with
    ``error`` set and the original text unchanged; batch-level failures raise
    BackendError.
    """
    for k, text in enumerate(texts):
        if not text.strip():
            raise ValueError(f"text {k} is empty")
    dispatch = [re.sub(r"\r\n|[\r\n]", " ", t) for t in texts]

    outcomes: list[SimplifyOutcome] = []
    for start in range(0, len(dispatch), backend.batch_size):
        chunk = dispatch[start : start + backend.batch_size]
        results = backend.process(chunk)
        if len(results) != len(chunk):
            raise BackendError(
                f"backend {backend.backend_id} returned {len(results)} results"
                f" for {len(chunk)} texts"
            )
        for offset, (simplified, error) in enumerate(results):
            original = texts[start + offset]
            if error is not None:
                outcomes.append(
                    SimplifyOutcome(original, original, backend.backend_id, False, str(error))
                )
            else:
                changed = _squash(simplified) != _squash(original)
                outcomes.append(
                    SimplifyOutcome(original, simplified, backend.backend_id, changed)
                )
    return outcomes


class EchoBackend(Backend):
    """Identity backend; every outcome is unchanged. Useful as a mock."""

    backend_id = "echo"

    def __init__(self, batch_size: int = DEFAULT_BATCH_SIZE):
        self.batch_size = batch_size

    def process(self, texts: list[str]) -> list[tuple[str, str | None]]:
        return [(t, None) for t in texts]


# --- rule simplifier -------------------------------------------------------------

# Lexicon substitution, parenthetical removal, and ", which " splitting. This is
# deliberately crude: it exists to exercise the pipeline deterministically and
# offline, not to compete with neural simplifiers.


def load_lexicon(path: str | Path) -> dict[str, str]:
    """Read "source<TAB>replacement" pairs; blank lines and '#' comments ignored."""
    lexicon: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        source, sep, replacement = stripped.partition("\t")
        if not sep or not source.strip() or not replacement.strip():
            raise ValueError(f"{path}: line {lineno}: expected 'source<TAB>replacement'")
        lexicon[source.strip()] = replacement.strip()
    return lexicon


def _match_case(matched: str, replacement: str) -> str:
    if matched.isupper() and len(matched) > 1:
        return replacement.upper()
    if matched[:1].isupper():
        return replacement[:1].upper() + replacement[1:]
    return replacement


_PARENTHETICAL = re.compile(r"\([^()]*\)")
_SENTENCE_END = (".", "!", "?")


def rules_simplify(lexicon: dict[str, str], text: str) -> str:
    """Deterministic rule-based simplification of one text.

    In order: case-preserving whole-word lexicon substitution; removal of
    non-nested parenthesized spans; splitting at the first ", which " with the
    relative pronoun replaced by the previous token.
    """
    for source, replacement in lexicon.items():
        pattern = re.compile(rf"\b{re.escape(source)}\b", re.IGNORECASE)
        text = pattern.sub(lambda m: _match_case(m.group(0), replacement), text)

    if "(" in text:
        text = _squash(_PARENTHETICAL.sub(" ", text))

    left, sep, rest = text.partition(", which ")
    if sep:
        head = left.split()[-1].rstrip('.,;:!?")') if left.split() else ""
        head = head or "It"
        left = left.rstrip()
        if not left.endswith(_SENTENCE_END):
            left += "."
        text = f"{left} {head[:1].upper()}{head[1:]} {rest}"
    return text


class RulesBackend(Backend):
    """Pure, thread-safe backend around :func:`rules_simplify`."""

    def __init__(self, lexicon: dict[str, str], backend_id: str = "rules",
                 batch_size: int = DEFAULT_BATCH_SIZE):
        self.lexicon = dict(lexicon)
        self.backend_id = backend_id
        self.batch_size = batch_size

    def process(self, texts: list[str]) -> list[tuple[str, str | None]]:
        return [(rules_simplify(self.lexicon, t), None) for t in texts]


# --- child-process backend --------------------------------------------------------


class ProcBackend(Backend):
    """Backend running as a child process speaking the line protocol.

    The child is started lazily on the first batch. One batch is in flight at
    a time; the instance is safe to share between threads but serializes work.
    """

    def __init__(self, command: str, timeout: float = DEFAULT_TIMEOUT,
                 batch_size: int = DEFAULT_BATCH_SIZE):
        self.command = command
        self.backend_id = f"proc:{command}"
        self.timeout = timeout
        self.batch_size = batch_size
        self._lock = threading.Lock()
        self._proc: subprocess.Popen | None = None
        self._reader: threading.Thread | None = None
        self._lines: queue.Queue = queue.Queue()
        self._next_id = 0

    def _pump(self, stream) -> None:
        for line in stream:
            self._lines.put(line)
        self._lines.put(None)

    def _read_line(self, what: str) -> str:
        try:
            item = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            raise BackendError(
                f"{self.backend_id}: timed out after {self.timeout}s waiting for {what}"
            ) from None
        if item is None:
            status = self._proc.poll() if self._proc else None
            raise BackendError(
                f"{self.backend_id}: process closed its output while we waited for {what}"
                + (f" (exit status {status})" if status is not None else "")
            )
        return item

    def _ensure_started(self) -> None:
        if self._proc is not None:
            return
        try:
            self._proc = subprocess.Popen(
                shlex.split(self.command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
            )
        except OSError as exc:
            raise BackendError(f"failed to start {self.command!r}: {exc}") from exc
        self._reader = threading.Thread(
            target=self._pump, args=(self._proc.stdout,), daemon=True
        )
        self._reader.start()
        handshake = self._read_line("the READY handshake").strip()
        if handshake != "READY":
            raise BackendError(
                f"{self.backend_id}: expected READY handshake, got {handshake!r}"
            )

    def process(self, texts: list[str]) -> list[tuple[str, str | None]]:
        with self._lock:
            self._ensure_started()
            assert self._proc is not None and self._proc.stdin is not None
            ids = list(range(self._next_id, self._next_id + len(texts)))
            self._next_id += len(texts)
            payload = "".join(
                json.dumps({"id": i, "text": t}, ensure_ascii=False) + "\n"
                for i, t in zip(ids, texts)
            )
            try:
                self._proc.stdin.write(payload)
                self._proc.stdin.flush()
            except (BrokenPipeError, OSError) as exc:
                raise BackendError(f"{self.backend_id}: write failed: {exc}") from exc

            expected = set(ids)
            by_id: dict[int, dict] = {}
            for _ in ids:
                line = self._read_line("a response")
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise BackendError(
                        f"{self.backend_id}: response line is not valid JSON"
                    ) from exc
                rid = obj.get("id") if isinstance(obj, dict) else None
                if rid not in expected:
                    raise BackendError(f"{self.backend_id}: unexpected response id {rid!r}")
                if rid in by_id:
                    raise BackendError(f"{self.backend_id}: duplicate response id {rid!r}")
                by_id[rid] = obj

            results: list[tuple[str, str | None]] = []
            for i, original in zip(ids, texts):
                obj = by_id[i]
                if obj.get("error") is not None:
                    results.append((original, str(obj["error"])))
                    continue
                simplified = obj.get("text")
                if not isinstance(simplified, str):
                    raise BackendError(f"{self.backend_id}: response {i} has no text")
                results.append((simplified, None))
            return results

    def close(self) -> int | None:
        with self._lock:
            proc, self._proc = self._proc, None
            if proc is None:
                return None
            try:
                proc.stdin.close()
            except OSError:
                pass
            try:
                status = proc.wait(timeout=self.timeout)
            except subprocess.TimeoutExpired:
                proc.kill()
                status = proc.wait()
            if self._reader is not None:
                self._reader.join(timeout=1.0)
                self._reader = None
            if status != 0:
                log.warning("backend process %r exited with status %s", self.command, status)
            return status


# --- http backend ------------------------------------------------------------------


class HttpBackend(Backend):
    """Backend behind ``POST url {"texts": [...]} -> {"simplified": [...]}``."""

    def __init__(self, url: str, timeout: float = DEFAULT_TIMEOUT,
                 batch_size: int = DEFAULT_BATCH_SIZE):
        self.url = url
        self.backend_id = f"http:{url}"
        self.timeout = timeout
        self.batch_size = batch_size

    def process(self, texts: list[str]) -> list[tuple[str, str | None]]:
        body = json.dumps({"texts": texts}, ensure_ascii=False).encode("utf-8")
        request = urllib.request.Request(
            self.url, data=body, headers={"Content-Type": "application/json"}
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as response:
                payload = json.loads(response.read().decode("utf-8"))
        except urllib.error.HTTPError as exc:
            raise BackendError(f"{self.backend_id}: HTTP {exc.code}") from exc
        except (urllib.error.URLError, TimeoutError, OSError, ValueError) as exc:
            raise BackendError(f"{self.backend_id}: request failed: {exc}") from exc
        simplified = payload.get("simplified") if isinstance(payload, dict) else None
        if (
            not isinstance(simplified, list)
            or len(simplified) != len(texts)
            or not all(isinstance(s, str) for s in simplified)
        ):
            raise BackendError(
                f"{self.backend_id}: malformed response (need {len(texts)} simplified texts)"
            )
        return [(s, None) for s in simplified]


def create_backend(spec: BackendSpec) -> Backend:
    """Instantiate the backend described by ``spec``."""
    if spec.kind == "echo":
        return EchoBackend(batch_size=spec.batch_size)
    if spec.kind == "rules":
        lexicon = load_lexicon(spec.locator) if spec.locator else {}
        return RulesBackend(
            lexicon, backend_id=f"rules:{spec.locator}" if spec.locator else "rules",
            batch_size=spec.batch_size,
        )
    if spec.kind == "proc":
        return ProcBackend(spec.locator, timeout=spec.timeout, batch_size=spec.batch_size)
    return HttpBackend(spec.locator, timeout=spec.timeout, batch_size=spec.batch_size)
