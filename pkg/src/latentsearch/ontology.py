"""Knowledge base store: class hierarchy, entities, facts, phrase lexicon.

The on-disk format is one UTF-8 text file of tab-separated, line-typed
records (blank lines and ``#`` comments are skipped):

    C <TAB> class_id <TAB> name <TAB> parent1,parent2,...
    E <TAB> entity_id <TAB> main_alias <TAB> alias1|alias2|... <TAB> class1,class2
    F <TAB> subject_id <TAB> relation_id <TAB> object_id
    R <TAB> surface phrase <TAB> relation_id <TAB> L|R
    R2 <TAB> part1 <TAB> part2 <TAB> relation_id <TAB> L|R
    W <TAB> wh-word <TAB> class_id

R2 records are two-part phrases matched when both parts occur in order
(e.g. "where ... buried"). The L|R direction names the side of the phrase
on which the fact's subject stands in surface text (for R2, relative to
the last part). A loaded ontology is immutable and safe for concurrent
readers.
"""

from dataclasses import dataclass, field
from pathlib import Path

from latentsearch.porter import porter_stem
from latentsearch.textproc import tokenize


class OntologyError(ValueError):
    """Load-time rejection: parse failure or invariant violation."""


@dataclass(frozen=True)
class ClassNode:
    class_id: str
    name: str
    parents: tuple[str, ...]


@dataclass(frozen=True)
class Entity:
    entity_id: str
    main_alias: str
    aliases: tuple[str, ...]
    classes: tuple[str, ...]


@dataclass(frozen=True)
class Fact:
    subject: str
    relation: str
    object: str


@dataclass(frozen=True)
class PhraseEntry:
    """A contiguous lexicon phrase mapped to a relation."""

    tokens: tuple[str, ...]
    relation: str
    direction: str  # "L" | "R": side of the phrase holding the fact subject


@dataclass(frozen=True)
class TwoPartPhraseEntry:
    """A discontiguous phrase (part1 ... part2) mapped to a relation."""

    part1: tuple[str, ...]
    part2: tuple[str, ...]
    relation: str
    direction: str


@dataclass(frozen=True)
class Ontology:
    classes: dict[str, ClassNode]
    entities: dict[str, Entity]
    facts: tuple[Fact, ...]
    phrases: tuple[PhraseEntry, ...]
    two_part_phrases: tuple[TwoPartPhraseEntry, ...]
    interrogatives: dict[str, str]  # wh-word -> class_id
    relations: frozenset[str]
    # derived lookup tables, built once at load
    _facts_by_subject: dict[str, tuple[Fact, ...]] = field(repr=False, default_factory=dict)
    _facts_by_object: dict[str, tuple[Fact, ...]] = field(repr=False, default_factory=dict)
    _alias_index: dict[tuple[str, ...], tuple[str, ...]] = field(repr=False, default_factory=dict)
    _class_stem_index: dict[tuple[str, ...], tuple[str, ...]] = field(repr=False, default_factory=dict)

    # -- lookups -----------------------------------------------------------

    def entity(self, entity_id: str) -> Entity:
        try:
            return self.entities[entity_id]
        except KeyError:
            raise KeyError(f"unknown entity: {entity_id!r}") from None

    def class_node(self, class_id: str) -> ClassNode:
        try:
            return self.classes[class_id]
        except KeyError:
            raise KeyError(f"unknown class: {class_id!r}") from None

    def is_subclass_of(self, class_id: str, ancestor: str) -> bool:
        """True iff class_id == ancestor or ancestor is reachable via parents."""
        self.class_node(ancestor)
        if class_id == ancestor:
            return True
        stack = list(self.class_node(class_id).parents)
        seen = set()
        while stack:
            cur = stack.pop()
            if cur == ancestor:
                return True
            if cur not in seen:
                seen.add(cur)
                stack.extend(self.classes[cur].parents)
        return False

    def resolve_alias(self, text: str) -> list[str]:
        """Entities whose alias matches the text, case-insensitively.

        Matching compares token sequences, so punctuation and case never
        matter; no fuzzy matching is attempted.
        """
        return list(self._alias_index.get(tuple(tokenize(text)), ()))

    def facts_matching(self, entity_id: str, relation: str,
                       anchor_side: str) -> list[Fact]:
        """All facts with the entity on the stated side under the relation."""
        self.entity(entity_id)
        if relation not in self.relations:
            raise KeyError(f"unknown relation: {relation!r}")
        if anchor_side == "subject":
            facts = self._facts_by_subject.get(entity_id, ())
        elif anchor_side == "object":
            facts = self._facts_by_object.get(entity_id, ())
        else:
            raise ValueError(f"anchor_side must be 'subject' or 'object', got {anchor_side!r}")
        return [f for f in facts if f.relation == relation]

    def neighbors(self, entity_id: str) -> list[tuple[str, str, str]]:
        """Entities one fact away, as (entity_id, relation, side-of-anchor)."""
        self.entity(entity_id)
        found = set()
        for fact in self._facts_by_subject.get(entity_id, ()):
            found.add((fact.object, fact.relation, "subject"))
        for fact in self._facts_by_object.get(entity_id, ()):
            found.add((fact.subject, fact.relation, "object"))
        return sorted(found)

    # -- recognizer support --------------------------------------------------

    def alias_matches(self, window: tuple[str, ...]) -> tuple[str, ...]:
        return self._alias_index.get(window, ())

    def class_name_matches(self, stems: tuple[str, ...]) -> tuple[str, ...]:
        return self._class_stem_index.get(stems, ())

    @property
    def max_alias_tokens(self) -> int:
        return max((len(k) for k in self._alias_index), default=0)

    @property
    def max_class_name_tokens(self) -> int:
        return max((len(k) for k in self._class_stem_index), default=0)

    @property
    def max_phrase_tokens(self) -> int:
        return max((len(p.tokens) for p in self.phrases), default=0)

    def summary(self) -> dict[str, int]:
        return {
            "classes": len(self.classes),
            "entities": len(self.entities),
            "facts": len(self.facts),
            "phrases": len(self.phrases) + len(self.two_part_phrases),
            "interrogatives": len(self.interrogatives),
        }


def _split_list(raw: str, sep: str) -> list[str]:
    return [item for item in (part.strip() for part in raw.split(sep)) if item]


def _check_cycle_free(classes: dict[str, ClassNode]) -> None:
    # iterative three-color DFS; reports one class on the cycle
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {cid: WHITE for cid in classes}
    for start in classes:
        if color[start] != WHITE:
            continue
        stack = [(start, iter(classes[start].parents))]
        color[start] = GRAY
        while stack:
            node, parents = stack[-1]
            advanced = False
            for parent in parents:
                if color[parent] == GRAY:
                    raise OntologyError(f"subclass cycle through class {parent!r}")
                if color[parent] == WHITE:
                    color[parent] = GRAY
                    stack.append((parent, iter(classes[parent].parents)))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()


def load_ontology(path: str | Path) -> Ontology:
    """Parse and validate an ontology file; any violation rejects the load."""
    classes: dict[str, ClassNode] = {}
    entities: dict[str, Entity] = {}
    facts: list[tuple[int, Fact]] = []
    phrases: list[PhraseEntry] = []
    two_part: list[TwoPartPhraseEntry] = []
    interrogatives: dict[str, str] = {}
    wh_lines: dict[str, int] = {}

    def fail(lineno: int, message: str):
        raise OntologyError(f"{path}:{lineno}: {message}")

    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            kind = fields[0]
            if kind == "C":
                if len(fields) != 4:
                    fail(lineno, "C record needs 4 fields")
                _, class_id, name, parents_raw = fields
                if not class_id:
                    fail(lineno, "empty class_id")
                if class_id in classes:
                    fail(lineno, f"duplicate class id {class_id!r}")
                classes[class_id] = ClassNode(
                    class_id=class_id, name=name,
                    parents=tuple(_split_list(parents_raw, ",")))
            elif kind == "E":
                if len(fields) != 5:
                    fail(lineno, "E record needs 5 fields")
                _, entity_id, main_alias, aliases_raw, classes_raw = fields
                if not entity_id:
                    fail(lineno, "empty entity_id")
                if entity_id in entities:
                    fail(lineno, f"duplicate entity id {entity_id!r}")
                if not main_alias:
                    fail(lineno, f"entity {entity_id!r} has empty main alias")
                aliases = [main_alias]
                for alias in _split_list(aliases_raw, "|"):
                    if alias not in aliases:
                        aliases.append(alias)
                class_ids = tuple(_split_list(classes_raw, ","))
                if not class_ids:
                    fail(lineno, f"entity {entity_id!r} declares no class")
                entities[entity_id] = Entity(
                    entity_id=entity_id, main_alias=main_alias,
                    aliases=tuple(aliases), classes=class_ids)
            elif kind == "F":
                if len(fields) != 4:
                    fail(lineno, "F record needs 4 fields")
                _, subject, relation, obj = fields
                if not subject or not relation or not obj:
                    fail(lineno, "F record has an empty field")
                facts.append((lineno, Fact(subject=subject, relation=relation, object=obj)))
            elif kind == "R":
                if len(fields) != 4:
                    fail(lineno, "R record needs 4 fields")
                _, phrase, relation, direction = fields
                tokens = tuple(tokenize(phrase))
                if not tokens:
                    fail(lineno, "R record has an empty phrase")
                if direction not in ("L", "R"):
                    fail(lineno, f"direction must be L or R, got {direction!r}")
                if not relation:
                    fail(lineno, "R record has an empty relation")
                phrases.append(PhraseEntry(tokens=tokens, relation=relation,
                                           direction=direction))
            elif kind == "R2":
                if len(fields) != 5:
                    fail(lineno, "R2 record needs 5 fields")
                _, part1, part2, relation, direction = fields
                tokens1 = tuple(tokenize(part1))
                tokens2 = tuple(tokenize(part2))
                if not tokens1 or not tokens2:
                    fail(lineno, "R2 record has an empty part")
                if direction not in ("L", "R"):
                    fail(lineno, f"direction must be L or R, got {direction!r}")
                if not relation:
                    fail(lineno, "R2 record has an empty relation")
                two_part.append(TwoPartPhraseEntry(part1=tokens1, part2=tokens2,
                                                   relation=relation,
                                                   direction=direction))
            elif kind == "W":
                if len(fields) != 3:
                    fail(lineno, "W record needs 3 fields")
                _, wh_word, class_id = fields
                word = wh_word.strip().lower()
                if not word:
                    fail(lineno, "W record has an empty word")
                if word in interrogatives:
                    fail(lineno, f"duplicate interrogative {word!r}")
                interrogatives[word] = class_id
                wh_lines[word] = lineno
            else:
                fail(lineno, f"unknown record type {kind!r}")

    # cross-reference validation after the whole file is parsed, so record
    # order in hand-written fixtures never matters
    for node in classes.values():
        for parent in node.parents:
            if parent not in classes:
                raise OntologyError(
                    f"{path}: class {node.class_id!r} has unknown parent {parent!r}")
    _check_cycle_free(classes)
    for entity in entities.values():
        for class_id in entity.classes:
            if class_id not in classes:
                raise OntologyError(
                    f"{path}: entity {entity.entity_id!r} has unknown class {class_id!r}")
    for lineno, fact in facts:
        if fact.subject not in entities:
            raise OntologyError(f"{path}:{lineno}: unknown fact subject {fact.subject!r}")
        if fact.object not in entities:
            raise OntologyError(f"{path}:{lineno}: unknown fact object {fact.object!r}")
    for word, class_id in interrogatives.items():
        if class_id not in classes:
            raise OntologyError(
                f"{path}:{wh_lines[word]}: interrogative {word!r} maps to unknown class {class_id!r}")

    relations = frozenset(p.relation for p in phrases) \
        | frozenset(p.relation for p in two_part) \
        | frozenset(f.relation for _, f in facts)

    fact_list = tuple(f for _, f in facts)
    by_subject: dict[str, list[Fact]] = {}
    by_object: dict[str, list[Fact]] = {}
    for fact in fact_list:
        by_subject.setdefault(fact.subject, []).append(fact)
        by_object.setdefault(fact.object, []).append(fact)

    alias_index: dict[tuple[str, ...], list[str]] = {}
    for entity in entities.values():
        for alias in entity.aliases:
            key = tuple(tokenize(alias))
            if not key:
                continue
            bucket = alias_index.setdefault(key, [])
            if entity.entity_id not in bucket:
                bucket.append(entity.entity_id)

    class_stems: dict[tuple[str, ...], list[str]] = {}
    for node in classes.values():
        key = tuple(porter_stem(tok) for tok in tokenize(node.name))
        if not key:
            continue
        bucket = class_stems.setdefault(key, [])
        if node.class_id not in bucket:
            bucket.append(node.class_id)

    return Ontology(
        classes=classes,
        entities=entities,
        facts=fact_list,
        phrases=tuple(phrases),
        two_part_phrases=tuple(two_part),
        interrogatives=interrogatives,
        relations=relations,
        _facts_by_subject={k: tuple(v) for k, v in by_subject.items()},
        _facts_by_object={k: tuple(v) for k, v in by_object.items()},
        _alias_index={k: tuple(sorted(v)) for k, v in alias_index.items()},
        _class_stem_index={k: tuple(sorted(v)) for k, v in class_stems.items()},
    )
