"""Two-stage relation extraction over dependency parses.

Stage A applies declarative lexico-syntactic rules: a trigger token (lemma
and/or POS constrained) anchors an ordered list of dependency-path
constraints; bound tokens must be covered by entity mentions of the required
types.  Subject-side and object-side bindings of the same property that share
a trigger token join into full triples.

Stage B is the per-relation lexicon fallback: when, for a given sentence and
property, stage A produced nothing, a domain-typed and a range-typed mention
plus a cue lemma between them (or on a small flank either side) yield a
candidate.

Every candidate keeps its provenance: extractor tag, sentence, evidence token
indices, and further attestations when the same statement is found again.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .corpus import Document, Sentence, Token
from .ner import EntityMention, TYPE_CLASS, mint_iri
from .store import Iri, Triple, triple_sort_key
from .vocab import VocabRegistry

DEFAULT_WINDOW = 3
RULE_CONFIDENCE = 0.8
LEXICON_CONFIDENCE = 0.5

TRIGGER = "T"
ROOT = "0"


class RulePackError(ValueError):
    pass


@dataclass(frozen=True)
class PathStep:
    """One dependency constraint between ``frm`` (already bound) and ``to``.

    Downward (default): ``frm`` governs ``to`` and the dependent's label must
    be one of ``deprels``.  Upward (``up=True``): ``to`` is the governor of
    ``frm`` and it is ``frm``'s own arc label that must match.  ``to`` either
    re-checks an already bound token or binds a new one, filtered by POS
    classes (matched against either tag column).
    """
    frm: str
    to: str
    deprels: frozenset[str]
    pos: frozenset[str] = frozenset()
    up: bool = False


@dataclass(frozen=True)
class LexSynRule:
    id: str
    property_iri: str
    role: str  # "subjectOf" | "objectOf" | "pair"
    trigger_lemmas: frozenset[str]
    trigger_pos: frozenset[str]
    path: tuple[PathStep, ...]
    netypes: dict[str, str] = field(default_factory=dict, hash=False)
    subject: str | None = None
    object: str | None = None

    def __post_init__(self):
        if not self.path:
            raise RulePackError(f"rule {self.id}: empty path")
        if self.role == "pair" and not (self.subject and self.object):
            raise RulePackError(f"rule {self.id}: pair rule must bind subject and object")
        if self.role == "subjectOf" and not self.subject:
            raise RulePackError(f"rule {self.id}: subjectOf rule must bind a subject")
        if self.role == "objectOf" and not self.object:
            raise RulePackError(f"rule {self.id}: objectOf rule must bind an object")


@dataclass(frozen=True)
class RelationLexicon:
    property_iri: str
    lemmas: frozenset[str]
    domain_type: str
    range_type: str

    def __post_init__(self):
        if not self.lemmas:
            raise RulePackError(f"lexicon {self.property_iri}: empty lemma set")
        for t in (self.domain_type, self.range_type):
            if t not in TYPE_CLASS:
                raise RulePackError(f"lexicon {self.property_iri}: unknown type {t!r}")


@dataclass(frozen=True)
class Evidence:
    sentence_id: str
    extractor: str
    tokens: tuple[int, ...]


@dataclass
class CandidateTriple:
    triple: Triple
    extractor: str
    sentence_id: str
    evidence: tuple[int, ...]
    confidence: float
    attestations: list[Evidence] = field(default_factory=list)

    def __post_init__(self):
        if not self.attestations:
            self.attestations = [Evidence(self.sentence_id, self.extractor, self.evidence)]


# ---------------------------------------------------------------------------
# Rule pack / lexicon loading
# ---------------------------------------------------------------------------

def _resolve_property(qname: str, registry: VocabRegistry | None) -> str:
    if registry is None:
        return qname
    iri = registry.resolve(qname) if ":" in qname and not qname.startswith("http") else qname
    norm = registry.normalize_property(iri)
    if not norm.known:
        raise RulePackError(f"unknown property {qname}")
    return norm.iri


def load_rules(text: str, registry: VocabRegistry | None = None) -> list[LexSynRule]:
    """Rule pack JSON: {"meta": ..., "rules": [...]}; property qnames are
    resolved and alias-normalized against the registry."""
    doc = json.loads(text)
    rules = []
    for raw in doc["rules"]:
        path = tuple(
            PathStep(step["from"], step["to"],
                     frozenset(step["deprel"]), frozenset(step.get("pos", [])),
                     up=step.get("dir", "down") == "up")
            for step in raw["path"]
        )
        rules.append(LexSynRule(
            id=raw["id"],
            property_iri=_resolve_property(raw["property"], registry),
            role=raw["role"],
            trigger_lemmas=frozenset(l.lower() for l in raw.get("lemmas", [])),
            trigger_pos=frozenset(raw.get("trigger_pos", [])),
            path=path,
            netypes=dict(raw.get("netypes", {})),
            subject=raw.get("subject"),
            object=raw.get("object"),
        ))
    ids = [r.id for r in rules]
    if len(set(ids)) != len(ids):
        raise RulePackError("duplicate rule ids")
    return rules


def load_lexicons(text: str, registry: VocabRegistry | None = None) -> list[RelationLexicon]:
    doc = json.loads(text)
    return [
        RelationLexicon(
            property_iri=_resolve_property(raw["property"], registry),
            lemmas=frozenset(l.lower() for l in raw["lemmas"]),
            domain_type=raw["domain"],
            range_type=raw["range"],
        )
        for raw in doc["lexicons"]
    ]


# ---------------------------------------------------------------------------
# Stage A: lexico-syntactic rules
# ---------------------------------------------------------------------------

def _pos_matches(token: Token, pos_classes: frozenset[str]) -> bool:
    return not pos_classes or token.xpos in pos_classes or token.upos in pos_classes


def _mention_covering(mentions: list[EntityMention], sent_id: str,
                      index: int) -> EntityMention | None:
    for m in mentions:
        if m.sentence_id == sent_id and m.span[0] <= index <= m.span[1]:
            return m
    return None


def _mention_iri(m: EntityMention) -> Iri:
    return Iri(m.linked_iri or mint_iri(m.surface))


@dataclass(frozen=True)
class _RoleBinding:
    rule_id: str
    property_iri: str
    role: str
    sentence_id: str
    trigger_index: int
    subject: EntityMention | None
    object: EntityMention | None
    tokens: tuple[int, ...]


def _enumerate_bindings(rule: LexSynRule, sent: Sentence,
                        trigger: Token) -> list[dict[str, Token]]:
    """All token environments satisfying the rule's path from this trigger."""
    try:
        root = sent.root
    except Exception:
        return []
    envs: list[dict[str, Token]] = [{TRIGGER: trigger, ROOT: root}]
    for step in rule.path:
        next_envs: list[dict[str, Token]] = []
        for env in envs:
            anchor = env.get(step.frm)
            if anchor is None:
                continue
            if step.up:
                # the anchor's own arc must match; its governor becomes `to`
                if anchor.head == 0 or anchor.deprel not in step.deprels:
                    continue
                governor = sent.token(anchor.head)
                if not _pos_matches(governor, step.pos):
                    continue
                if step.to in env:
                    if env[step.to].index == governor.index:
                        next_envs.append(env)
                else:
                    extended = dict(env)
                    extended[step.to] = governor
                    next_envs.append(extended)
                continue
            if step.to in env:
                dep = env[step.to]
                if dep.head == anchor.index and dep.deprel in step.deprels \
                        and _pos_matches(dep, step.pos):
                    next_envs.append(env)
                continue
            for dep in sent.dependents(anchor.index):
                if dep.deprel in step.deprels and _pos_matches(dep, step.pos):
                    extended = dict(env)
                    extended[step.to] = dep
                    next_envs.append(extended)
        envs = next_envs
        if not envs:
            break
    return envs


def apply_rules(doc: Document, mentions: list[EntityMention],
                rules: list[LexSynRule],
                confidence: float = RULE_CONFIDENCE) -> list[CandidateTriple]:
    """Stage A.  Rule order never matters: rules run in id order and results
    are set-deduplicated."""
    bindings: list[_RoleBinding] = []
    for sent in doc.sentences:
        for rule in sorted(rules, key=lambda r: r.id):
            for token in sent.tokens:
                if rule.trigger_lemmas and token.lemma.lower() not in rule.trigger_lemmas \
                        and token.form.lower() not in rule.trigger_lemmas:
                    continue
                if not _pos_matches(token, rule.trigger_pos):
                    continue
                for env in _enumerate_bindings(rule, sent, token):
                    binding = _bind_roles(rule, sent, env, mentions)
                    if binding is not None:
                        bindings.append(binding)

    # join half-bindings on (property, sentence-trigger token)
    candidates: dict[tuple[Triple, str], CandidateTriple] = {}

    def emit(sent_id: str, prop: str, subj: EntityMention, obj: EntityMention,
             extractor: str, tokens: tuple[int, ...]):
        triple = Triple(_mention_iri(subj), Iri(prop), _mention_iri(obj))
        key = (triple, sent_id)
        ev = Evidence(sent_id, extractor, tokens)
        existing = candidates.get(key)
        if existing is None:
            candidates[key] = CandidateTriple(triple, extractor, sent_id, tokens,
                                              confidence, [ev])
        elif ev not in existing.attestations:
            existing.attestations.append(ev)

    by_group: dict[tuple[str, str, int], list[_RoleBinding]] = {}
    for b in bindings:
        if b.role == "pair":
            assert b.subject is not None and b.object is not None
            emit(b.sentence_id, b.property_iri, b.subject, b.object,
                 f"rule:{b.rule_id}", b.tokens)
        else:
            by_group.setdefault((b.property_iri, b.sentence_id, b.trigger_index),
                                []).append(b)
    for (prop, sent_id, _trigger), group in by_group.items():
        subjects = [b for b in group if b.role == "subjectOf"]
        objects = [b for b in group if b.role == "objectOf"]
        for sb in subjects:
            for ob in objects:
                assert sb.subject is not None and ob.object is not None
                ids = "+".join(sorted({sb.rule_id, ob.rule_id}))
                emit(sent_id, prop, sb.subject, ob.object, f"rule:{ids}",
                     tuple(sorted(set(sb.tokens) | set(ob.tokens))))

    return sorted(candidates.values(),
                  key=lambda c: (c.sentence_id, triple_sort_key(c.triple)))


def _bind_roles(rule: LexSynRule, sent: Sentence, env: dict[str, Token],
                mentions: list[EntityMention]) -> _RoleBinding | None:
    covering: dict[str, EntityMention] = {}
    for name, wanted_type in rule.netypes.items():
        token = env.get(name)
        if token is None:
            return None
        m = _mention_covering(mentions, sent.id, token.index)
        if m is None or (wanted_type != "ANY" and m.entity_type != wanted_type):
            return None
        covering[name] = m

    def role_mention(name: str | None) -> EntityMention | None:
        if name is None:
            return None
        if name in covering:
            return covering[name]
        token = env.get(name)
        if token is None:
            return None
        return _mention_covering(mentions, sent.id, token.index)

    subj = role_mention(rule.subject)
    obj = role_mention(rule.object)
    if rule.subject is not None and subj is None:
        return None
    if rule.object is not None and obj is None:
        return None
    if subj is not None and obj is not None and subj.span == obj.span:
        return None
    tokens = tuple(sorted({t.index for t in env.values()}))
    return _RoleBinding(rule.id, rule.property_iri, rule.role, sent.id,
                        env[TRIGGER].index, subj, obj, tokens)


# ---------------------------------------------------------------------------
# Stage B: relation lexicons
# ---------------------------------------------------------------------------

def apply_lexicon(doc: Document, mentions: list[EntityMention],
                  lexicons: list[RelationLexicon], window: int = DEFAULT_WINDOW,
                  confidence: float = LEXICON_CONFIDENCE) -> list[CandidateTriple]:
    """Stage B over every sentence (the gating against stage A happens in
    :func:`extract`)."""
    candidates: dict[tuple[Triple, str], CandidateTriple] = {}
    for sent in doc.sentences:
        sent_mentions = [m for m in mentions if m.sentence_id == sent.id]
        for lex in lexicons:
            domains = [m for m in sent_mentions if m.entity_type == lex.domain_type]
            ranges = [m for m in sent_mentions if m.entity_type == lex.range_type]
            for dm in domains:
                for rm in ranges:
                    if dm.span == rm.span:
                        continue
                    hit = _lexicon_hit(sent, dm, rm, lex.lemmas, window)
                    if hit is None:
                        continue
                    triple = Triple(_mention_iri(dm), Iri(lex.property_iri),
                                    _mention_iri(rm))
                    extractor = f"lexicon:{lex.property_iri}"
                    ev = Evidence(sent.id, extractor,
                                  (hit, dm.span[0], rm.span[0]))
                    key = (triple, sent.id)
                    existing = candidates.get(key)
                    if existing is None:
                        candidates[key] = CandidateTriple(
                            triple, extractor, sent.id, ev.tokens, confidence, [ev])
                    elif ev not in existing.attestations:
                        existing.attestations.append(ev)
    return sorted(candidates.values(),
                  key=lambda c: (c.sentence_id, triple_sort_key(c.triple)))


def _lexicon_hit(sent: Sentence, a: EntityMention, b: EntityMention,
                 lemmas: frozenset[str], window: int) -> int | None:
    """Index of the first cue lemma between the mentions or on their outer
    flanks (``window`` tokens each side), else None."""
    first, second = (a, b) if a.span[0] <= b.span[0] else (b, a)
    n = len(sent.tokens)
    indices: list[int] = []
    indices.extend(range(max(1, first.span[0] - window), first.span[0]))
    indices.extend(range(first.span[1] + 1, second.span[0]))
    indices.extend(range(second.span[1] + 1, min(n, second.span[1] + window) + 1))
    for idx in indices:
        tok = sent.token(idx)
        if tok.lemma.lower() in lemmas or tok.form.lower() in lemmas:
            return idx
    return None


# ---------------------------------------------------------------------------
# Two-stage composition
# ---------------------------------------------------------------------------

def extract(doc: Document, mentions: list[EntityMention],
            rules: list[LexSynRule], lexicons: list[RelationLexicon],
            window: int = DEFAULT_WINDOW,
            rule_confidence: float = RULE_CONFIDENCE,
            lexicon_confidence: float = LEXICON_CONFIDENCE) -> list[CandidateTriple]:
    """Stage A plus stage B on the (sentence, property) pairs stage A left
    uncovered; deduplicated on (s, p, o) with attestations merged."""
    stage_a = apply_rules(doc, mentions, rules, rule_confidence)
    covered = {(c.sentence_id, c.triple.p.value) for c in stage_a}
    stage_b = [
        c for c in apply_lexicon(doc, mentions, lexicons, window, lexicon_confidence)
        if (c.sentence_id, c.triple.p.value) not in covered
    ]

    merged: dict[Triple, CandidateTriple] = {}
    for c in stage_a + stage_b:
        existing = merged.get(c.triple)
        if existing is None:
            merged[c.triple] = CandidateTriple(c.triple, c.extractor, c.sentence_id,
                                               c.evidence, c.confidence,
                                               list(c.attestations))
        else:
            for ev in c.attestations:
                if ev not in existing.attestations:
                    existing.attestations.append(ev)
    return sorted(merged.values(),
                  key=lambda c: (triple_sort_key(c.triple), c.sentence_id))
