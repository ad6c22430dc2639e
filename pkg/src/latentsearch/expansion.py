"""Query expansion by constrained spreading activation over the ontology.

Two expanders are provided. The query-oriented one follows a six-step
pipeline: recognize relation phrases, map them to relations, recognize
initial concepts (entities and classes), build I-R-C relation forms, pick
latent entities that hold the query's relation with the initial entity and
fall under the target class, then append their main aliases to the query.
The baseline expander spreads once along every link of each initial entity
(distance 1, all relations, no class filter).

Both expanders are pure over an immutable ontology.
"""

from dataclasses import dataclass

from latentsearch.ontology import Ontology
from latentsearch.porter import porter_stem
from latentsearch.textproc import normalize, tokenize

Span = tuple[int, int]  # token index range, end exclusive

METHOD_QOCSA = "qocsa"
METHOD_CSA = "csa"
METHOD_NONE = "none"

SUBJECT_IS_INITIAL = "I-R-C"  # the recognized entity is the fact subject
SUBJECT_IS_LATENT = "C-R-I"   # latent entities are fact subjects


@dataclass(frozen=True)
class PhraseMatch:
    """A lexicon phrase found in the query; two spans when discontiguous."""

    spans: tuple[Span, ...]
    relation: str
    direction: str
    surface: str

    @property
    def anchor(self) -> Span:
        """Span the subject side is judged against (last part for R2)."""
        return self.spans[-1]


@dataclass(frozen=True)
class RelationForm:
    initial_entity: str
    relation: str
    target_class: str
    orientation: str  # SUBJECT_IS_INITIAL | SUBJECT_IS_LATENT


@dataclass(frozen=True)
class ActivatedEntity:
    entity_id: str
    main_alias: str
    form_index: int | None  # None for the distance-1 baseline


@dataclass(frozen=True)
class ExpansionResult:
    query: str
    original_terms: tuple[str, ...]
    forms: tuple[RelationForm, ...]
    activated: tuple[ActivatedEntity, ...]
    expanded_terms: tuple[str, ...]
    method_tag: str  # METHOD_QOCSA | METHOD_CSA | METHOD_NONE

    @property
    def expanded_text(self) -> str:
        parts = [self.query] + [a.main_alias for a in self.activated]
        return " ".join(parts)


def recognize_relation_phrases(query: str, ont: Ontology) -> list[PhraseMatch]:
    """Find lexicon phrases in the query and map them to relations.

    Two-part phrases are tried first (in lexicon order), claiming their
    tokens; contiguous phrases then match greedily longest-first, left to
    right, over unclaimed tokens. Matched spans never overlap.
    """
    tokens = tuple(tokenize(query))
    n = len(tokens)
    claimed = [False] * n
    matches: list[PhraseMatch] = []

    def window_free(start: int, length: int) -> bool:
        return not any(claimed[start:start + length])

    def claim(start: int, length: int) -> None:
        for i in range(start, start + length):
            claimed[i] = True

    def find_part(part: tuple[str, ...], from_pos: int) -> int | None:
        for start in range(from_pos, n - len(part) + 1):
            if tokens[start:start + len(part)] == part and window_free(start, len(part)):
                return start
        return None

    for entry in ont.two_part_phrases:
        start1 = find_part(entry.part1, 0)
        if start1 is None:
            continue
        start2 = find_part(entry.part2, start1 + len(entry.part1))
        if start2 is None:
            continue
        claim(start1, len(entry.part1))
        claim(start2, len(entry.part2))
        matches.append(PhraseMatch(
            spans=((start1, start1 + len(entry.part1)),
                   (start2, start2 + len(entry.part2))),
            relation=entry.relation,
            direction=entry.direction,
            surface=" ".join(entry.part1) + " ... " + " ".join(entry.part2)))

    by_tokens = {p.tokens: p for p in ont.phrases}
    max_len = ont.max_phrase_tokens
    pos = 0
    while pos < n:
        if claimed[pos]:
            pos += 1
            continue
        hit = None
        for length in range(min(max_len, n - pos), 0, -1):
            if not window_free(pos, length):
                continue
            entry = by_tokens.get(tokens[pos:pos + length])
            if entry is not None:
                hit = (length, entry)
                break
        if hit is None:
            pos += 1
            continue
        length, entry = hit
        claim(pos, length)
        matches.append(PhraseMatch(
            spans=((pos, pos + length),),
            relation=entry.relation,
            direction=entry.direction,
            surface=" ".join(entry.tokens)))
        pos += length

    matches.sort(key=lambda m: m.spans[0])
    return matches


def recognize_initial_concepts(
        query: str, ont: Ontology,
) -> tuple[list[tuple[Span, str]], list[tuple[Span, str]]]:
    """Initial concepts of the query: (entity mentions, class mentions).

    Entities match aliases exactly (longest window wins, left to right);
    classes match by stem-folded name (so plural forms hit) or through the
    interrogative map (e.g. "where" names the location class). Entity and
    class mentions may overlap relation phrases and each other: the
    recognizers run independently over the raw query.
    """
    tokens = tuple(tokenize(query))
    n = len(tokens)

    entities: list[tuple[Span, str]] = []
    pos = 0
    max_alias = ont.max_alias_tokens
    while pos < n:
        hit_len = 0
        hit_ids: tuple[str, ...] = ()
        for length in range(min(max_alias, n - pos), 0, -1):
            ids = ont.alias_matches(tokens[pos:pos + length])
            if ids:
                hit_len, hit_ids = length, ids
                break
        if hit_len:
            span = (pos, pos + hit_len)
            entities.extend((span, entity_id) for entity_id in hit_ids)
            pos += hit_len
        else:
            pos += 1

    classes: list[tuple[Span, str]] = []
    stems = tuple(porter_stem(tok) for tok in tokens)
    max_name = ont.max_class_name_tokens
    pos = 0
    while pos < n:
        hit_len = 0
        hit_ids = ()
        for length in range(min(max_name, n - pos), 0, -1):
            ids = ont.class_name_matches(stems[pos:pos + length])
            if ids:
                hit_len, hit_ids = length, ids
                break
        if hit_len:
            span = (pos, pos + hit_len)
            classes.extend((span, class_id) for class_id in hit_ids)
            pos += hit_len
        else:
            pos += 1
    for i, token in enumerate(tokens):
        class_id = ont.interrogatives.get(token)
        if class_id is not None:
            classes.append(((i, i + 1), class_id))

    classes = sorted(set(classes))
    return entities, classes


def _span_gap(a: Span, b: Span) -> int:
    return max(0, b[0] - a[1], a[0] - b[1])


def _distance_to_phrase(span: Span, match: PhraseMatch) -> int:
    return min(_span_gap(span, part) for part in match.spans)


def _nearest_span(match: PhraseMatch, mentions: list[tuple[Span, str]]) -> Span | None:
    spans = sorted(set(span for span, _ in mentions))
    if not spans:
        return None
    # ties break on the leftmost span
    return min(spans, key=lambda s: (_distance_to_phrase(s, match), s))


def build_relation_forms(
        phrase_matches: list[PhraseMatch],
        entities: list[tuple[Span, str]],
        classes: list[tuple[Span, str]],
) -> list[RelationForm]:
    """Pair each recognized relation with its nearest entity and class.

    The form's orientation resolves the fact role of the initial entity:
    it is the subject exactly when it stands on the phrase's declared
    subject side (left of the anchor for L, right for R). Relations with
    no co-occurring entity or class yield no form.
    """
    forms: list[RelationForm] = []
    seen = set()
    for match in phrase_matches:
        entity_span = _nearest_span(match, entities)
        class_span = _nearest_span(match, classes)
        if entity_span is None or class_span is None:
            continue
        entity_ids = sorted(e for span, e in entities if span == entity_span)
        class_ids = sorted(c for span, c in classes if span == class_span)
        side = "L" if entity_span[1] <= match.anchor[0] else "R"
        orientation = SUBJECT_IS_INITIAL if side == match.direction else SUBJECT_IS_LATENT
        for entity_id in entity_ids:
            for class_id in class_ids:
                key = (entity_id, match.relation, class_id, orientation)
                if key not in seen:
                    seen.add(key)
                    forms.append(RelationForm(
                        initial_entity=entity_id,
                        relation=match.relation,
                        target_class=class_id,
                        orientation=orientation))
    return forms


def activate(form: RelationForm, ont: Ontology) -> list[str]:
    """Latent entities holding the form's relation with the initial entity
    and belonging to the target class or one of its subclasses."""
    if form.orientation == SUBJECT_IS_INITIAL:
        facts = ont.facts_matching(form.initial_entity, form.relation, "subject")
        candidates = [f.object for f in facts]
    else:
        facts = ont.facts_matching(form.initial_entity, form.relation, "object")
        candidates = [f.subject for f in facts]
    activated = {
        entity_id
        for entity_id in candidates
        if any(ont.is_subclass_of(c, form.target_class)
               for c in ont.entity(entity_id).classes)
    }
    return sorted(activated)


def _build_result(query: str, forms: tuple[RelationForm, ...],
                  activated: list[ActivatedEntity],
                  method: str) -> ExpansionResult:
    original_terms = tuple(normalize(tokenize(query)))
    if activated:
        alias_text = " ".join(a.main_alias for a in activated)
        expanded_terms = original_terms + tuple(normalize(tokenize(alias_text)))
        tag = method
    else:
        expanded_terms = original_terms
        tag = METHOD_NONE
    return ExpansionResult(
        query=query,
        original_terms=original_terms,
        forms=forms,
        activated=tuple(activated),
        expanded_terms=expanded_terms,
        method_tag=tag)


def expand_query_qocsa(query: str, ont: Ontology) -> ExpansionResult:
    """Run the full query-oriented pipeline and append main aliases."""
    phrase_matches = recognize_relation_phrases(query, ont)
    entities, classes = recognize_initial_concepts(query, ont)
    forms = build_relation_forms(phrase_matches, entities, classes)
    activated: list[ActivatedEntity] = []
    seen: set[str] = set()
    for index, form in enumerate(forms):
        for entity_id in activate(form, ont):
            if entity_id not in seen:
                seen.add(entity_id)
                activated.append(ActivatedEntity(
                    entity_id=entity_id,
                    main_alias=ont.entity(entity_id).main_alias,
                    form_index=index))
    return _build_result(query, tuple(forms), activated, METHOD_QOCSA)


def expand_query_csa(query: str, ont: Ontology) -> ExpansionResult:
    """Distance-1 baseline: activate every neighbor of each initial entity,
    over all relations, with a single activation pulse."""
    entities, _ = recognize_initial_concepts(query, ont)
    initial = {entity_id for _, entity_id in entities}
    neighbor_ids: set[str] = set()
    for entity_id in sorted(initial):
        neighbor_ids.update(nb for nb, _, _ in ont.neighbors(entity_id))
    activated = [
        ActivatedEntity(entity_id=entity_id,
                        main_alias=ont.entity(entity_id).main_alias,
                        form_index=None)
        for entity_id in sorted(neighbor_ids - initial)
    ]
    return _build_result(query, (), activated, METHOD_CSA)
