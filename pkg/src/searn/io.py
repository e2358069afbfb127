"""CoNLL column files, the model file format, and evaluation reports.

Model files are line-oriented text::

    searn-model 1
    timestamp 2024-01-01T00:00:00+00:00
    task {"beam_width": 1, "task": {...}}
    components 2
    component 0.75 perceptron 3
    bias 0 0.125
    w 0 1043 -0.5
    ...
    end
    checksum sha256 <hex>

The checksum covers every line except the timestamp and the checksum
itself, so two runs with the same inputs differ only on the timestamp.
Floats are written with ``repr`` and read back bit-exactly.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .core import INITIAL_POLICY, MixturePolicy
from .cost_learn import LinearClassifier
from .exceptions import CorruptFile, EmptyFile, LengthMismatch, MalformedRow, UnsupportedVersion
from .tasks.chunk import ChunkTask
from .tasks.data import LabeledSentence, Sentence
from .tasks.features import FeatureConfig
from .tasks.losses import bio_decode, bio_repair, f1_from_counts, split_label
from .tasks.sequence import SequenceLabelingTask

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
MAGIC = "searn-model"

TOKEN = "token"
LABEL = "label"


# -- atomic writes ------------------------------------------------------------


def atomic_write_text(path, text: str):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- CoNLL --------------------------------------------------------------------


def default_schema(n_columns: int, labeled: bool = True):
    if n_columns == 1:
        return (TOKEN,)
    if not labeled:
        return (TOKEN, "pos") if n_columns == 2 else (TOKEN,) + tuple(f"c{i}" for i in range(1, n_columns))
    if n_columns == 2:
        return (TOKEN, LABEL)
    if n_columns == 3:
        return (TOKEN, "pos", LABEL)
    return (TOKEN,) + tuple(f"c{i}" for i in range(1, n_columns - 1)) + (LABEL,)


def parse_schema(schema):
    """Accept ``"token,pos,label"`` or a sequence; validate the layout."""
    if schema is None:
        return None
    if isinstance(schema, str):
        schema = [s.strip() for s in schema.split(",") if s.strip()]
    schema = tuple(schema)
    if not schema or schema[0] != TOKEN:
        raise ValueError("schema must start with 'token'")
    if LABEL in schema[:-1]:
        raise ValueError("'label' must be the last schema column")
    if len(set(schema)) != len(schema):
        raise ValueError("schema columns must be distinct")
    return schema


def _blocks(path):
    with open(path, encoding="utf-8") as fh:
        block = []
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                if block:
                    yield block
                    block = []
                continue
            block.append((lineno, line.split()))
        if block:
            yield block


def read_conll(path, schema=None):
    """Read a CoNLL column file into a list of sentences.

    Sentences are separated by blank lines.  With a ``label`` column the
    result holds :class:`LabeledSentence` values, otherwise
    :class:`Sentence` values.  Without a schema, one is inferred from the
    first row (see :func:`default_schema`).  Dangling ``I-X`` tags are
    kept as written and logged; tasks repair them when decoding.
    """
    schema = parse_schema(schema)
    data = []
    for block in _blocks(path):
        if schema is None:
            schema = default_schema(len(block[0][1]))
        width = len(schema)
        for lineno, cols in block:
            if len(cols) != width:
                raise MalformedRow(lineno, f"line {lineno}: expected {width} columns, found {len(cols)}")
        words = [cols[0] for _, cols in block]
        attrs = {name: [cols[k] for _, cols in block] for k, name in enumerate(schema) if name not in (TOKEN, LABEL)}
        sent = Sentence.from_words(words, **attrs)
        if schema[-1] == LABEL:
            labels = tuple(cols[-1] for _, cols in block)
            _log_repairs(labels, block[0][0])
            data.append(LabeledSentence(sent, labels))
        else:
            data.append(sent)
    if not data:
        raise EmptyFile(f"{path}: no sentences")
    return data


def _log_repairs(labels, lineno):
    try:
        for lab in labels:
            split_label(lab)
    except ValueError:
        return  # not a BIO column
    repaired = bio_repair(labels)
    if tuple(repaired) != tuple(labels):
        logger.warning("sentence at line %d: dangling I- tags read as B-", lineno)


def sentence_columns(item, schema):
    sent = item.sentence if isinstance(item, LabeledSentence) else item
    rows = []
    for i, tok in enumerate(sent.tokens):
        row = []
        for name in schema:
            if name == TOKEN:
                row.append(tok.text)
            elif name == LABEL:
                row.append(item.labels[i])
            else:
                value = tok.attr(name)
                if value is None:
                    raise ValueError(f"token {tok.text!r} has no {name!r} attribute")
                row.append(value)
        rows.append(row)
    return rows


def format_conll(dataset, schema=None) -> str:
    dataset = list(dataset)
    if not dataset:
        raise EmptyFile("nothing to write")
    if schema is None:
        first = dataset[0]
        sent = first.sentence if isinstance(first, LabeledSentence) else first
        schema = (TOKEN,) + tuple(k for k, _ in sent.tokens[0].attrs)
        if isinstance(first, LabeledSentence):
            schema += (LABEL,)
    schema = parse_schema(schema)
    lines = []
    for item in dataset:
        for row in sentence_columns(item, schema):
            for cell in row:
                if not cell or any(ch.isspace() for ch in cell):
                    raise ValueError(f"cell {cell!r} is empty or contains whitespace")
            lines.append(" ".join(row))
        lines.append("")
    return "\n".join(lines)


def write_conll(path, dataset, schema=None):
    atomic_write_text(path, format_conll(dataset, schema))


# -- tasks --------------------------------------------------------------------


def task_from_description(d: dict):
    features = FeatureConfig.from_description(d["features"])
    if d["kind"] == "sequence":
        return SequenceLabelingTask(d["labels"], d["loss"], features)
    if d["kind"] == "chunk":
        return ChunkTask(d["types"], d["max_phrase"], features)
    raise CorruptFile(f"unknown task kind {d['kind']!r}")


# -- models -------------------------------------------------------------------


def _checksum(lines) -> str:
    h = hashlib.sha256()
    for line in lines:
        if line.startswith("timestamp "):
            continue
        h.update(line.encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


@dataclass
class LoadedModel:
    policy: MixturePolicy
    task: object
    beam_width: int = 1
    meta: dict = field(default_factory=dict)


def format_model(
    policy: MixturePolicy, task, beam_width: int = 1, timestamp: str | None = None, meta: dict | None = None
) -> str:
    if policy.pi_weight > 0 or any(p is INITIAL_POLICY for p, _ in policy.components):
        raise ValueError("strip the initial policy before saving")
    if timestamp is None:
        timestamp = datetime.now(timezone.utc).replace(microsecond=0).isoformat()
    header = {"beam_width": beam_width, "generation": policy.generation, "task": task.describe()}
    if meta:
        header["meta"] = meta
    lines = [
        f"{MAGIC} {FORMAT_VERSION}",
        f"timestamp {timestamp}",
        "task " + json.dumps(header, sort_keys=True),
        f"components {len(policy.components)}",
    ]
    for clf, weight in policy.components:
        if not isinstance(clf, LinearClassifier):
            raise TypeError(f"cannot serialize {type(clf).__name__}")
        name = clf.name or "linear"
        lines.append(f"component {weight!r} {name} {clf.action_count}")
        for a, b in enumerate(clf.bias):
            lines.append(f"bias {a} {float(b)!r}")
        for a, w in enumerate(clf.weights):
            for idx in sorted(w):
                lines.append(f"w {a} {idx} {float(w[idx])!r}")
    lines.append("end")
    lines.append(f"checksum sha256 {_checksum(lines)}")
    return "\n".join(lines) + "\n"


def write_model(policy, task, path, beam_width: int = 1, timestamp: str | None = None, meta: dict | None = None):
    atomic_write_text(path, format_model(policy, task, beam_width, timestamp, meta))


def parse_model(text: str) -> LoadedModel:
    """Inverse of :func:`format_model`."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise CorruptFile("empty model file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != MAGIC:
        raise CorruptFile("not a model file")
    if head[1] != str(FORMAT_VERSION):
        raise UnsupportedVersion(f"model format version {head[1]!r} is not supported (expected {FORMAT_VERSION})")
    if len(lines) < 2 or not lines[-1].startswith("checksum sha256 "):
        raise CorruptFile("missing checksum trailer (truncated file?)")
    if lines[-1].split()[-1] != _checksum(lines[:-1]):
        raise CorruptFile("checksum mismatch")
    try:
        return _parse_body(lines[:-1])
    except (ValueError, KeyError, IndexError) as exc:
        raise CorruptFile(f"unreadable model body: {exc}") from None


def _parse_body(lines):
    it = iter(lines[1:])
    line = next(it)
    if line.startswith("timestamp "):
        line = next(it)
    if not line.startswith("task "):
        raise ValueError("expected task line")
    header = json.loads(line[5:])
    task = task_from_description(header["task"])
    n = int(next(it).split()[1])
    comps = []
    clf = None
    for line in it:
        parts = line.split()
        tag = parts[0]
        if tag == "component":
            k = int(parts[3])
            clf = LinearClassifier([{} for _ in range(k)], [0.0] * k, k, parts[2])
            comps.append((clf, float(parts[1])))
        elif tag == "bias":
            clf.bias[int(parts[1])] = float(parts[2])
        elif tag == "w":
            clf.weights[int(parts[1])][int(parts[2])] = float(parts[3])
        elif tag == "end":
            break
        else:
            raise ValueError(f"unknown record {tag!r}")
    else:
        raise ValueError("missing end marker")
    if len(comps) != n:
        raise ValueError(f"expected {n} components, found {len(comps)}")
    policy = MixturePolicy(tuple(comps), header.get("generation", 0))
    return LoadedModel(policy, task, int(header.get("beam_width", 1)), header.get("meta", {}))


def load_model(path) -> LoadedModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def read_model(path):
    """``(policy, task)``; see :func:`load_model` for the beam width and metadata."""
    m = load_model(path)
    return m.policy, m.task


# -- evaluation ---------------------------------------------------------------


@dataclass
class EvalReport:
    loss_kind: str
    value: float
    count: int
    per_sentence: list = field(default_factory=list)
    total: float = 0.0
    precision: float | None = None
    recall: float | None = None
    f1: float | None = None

    def as_dict(self) -> dict:
        d = {"loss": self.loss_kind, "value": self.value, "count": self.count, "total": self.total}
        if self.loss_kind == "f1":
            d.update(precision=self.precision, recall=self.recall, f1=self.f1)
        return d


def _labels(item):
    return tuple(item.labels) if isinstance(item, LabeledSentence) else tuple(item)


def evaluate(gold, predicted, loss_kind="hamming") -> EvalReport:
    """Hamming: ``value`` is the per-token error rate.  F1: corpus-pooled F1.

    Precision with no predicted chunks is reported as 0.
    """
    gold = [_labels(g) for g in gold]
    predicted = [_labels(p) for p in predicted]
    if len(gold) != len(predicted):
        raise LengthMismatch(f"{len(gold)} gold sentences but {len(predicted)} predicted")
    for i, (g, p) in enumerate(zip(gold, predicted)):
        if len(g) != len(p):
            raise LengthMismatch(f"sentence {i}: {len(g)} gold labels but {len(p)} predicted")
    if loss_kind == "hamming":
        errs = [sum(1 for a, b in zip(g, p) if a != b) for g, p in zip(gold, predicted)]
        tokens = sum(len(g) for g in gold)
        total = float(sum(errs))
        return EvalReport("hamming", total / tokens if tokens else 0.0, len(gold), errs, total)
    if loss_kind != "f1":
        raise ValueError(f"unknown loss {loss_kind!r}")
    correct = n_gold = n_pred = 0
    per = []
    for g, p in zip(gold, predicted):
        gs, ps = set(bio_decode(g)), set(bio_decode(p))
        c = len(gs & ps)
        per.append(f1_from_counts(c, len(gs), len(ps)))
        correct, n_gold, n_pred = correct + c, n_gold + len(gs), n_pred + len(ps)
    precision = correct / n_pred if n_pred else 0.0
    recall = correct / n_gold if n_gold else 0.0
    f1 = f1_from_counts(correct, n_gold, n_pred)
    return EvalReport("f1", f1, len(gold), per, float(correct), precision, recall, f1)
