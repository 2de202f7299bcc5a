"""Evaluate the UI encoding into a widget tree and serialize it.

The UI program together with the domain-state facts has one intended
stable model; its ``elem/3``, ``attr/3`` and ``when/4`` atoms describe the
layout, styling and reactivity.  The tree is validated (unique ids, acyclic
parents, known widget types), siblings are ordered deterministically, and
the JSON wire format is byte-deterministic for a given tree.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from .asp.externals import concat
from .solver import ProgramBundle, SolveMode, SolveRequest, SolverBridge
from .terms import (
    Constant,
    Function,
    QuotedString,
    Term,
    parse_term,
    render_term,
    term_sort_key,
)

log = logging.getLogger(__name__)

WIDGET_TYPES = frozenset(
    {
        "window",
        "container",
        "menu_bar",
        "label",
        "button",
        "dropdown_menu",
        "dropdown_menu_item",
        "textfield",
        "modal",
        "message",
    }
)

ACTIONS = frozenset({"call", "update", "context"})

ROOT_ID = Constant("root")

# keys whose values accumulate instead of overriding each other
ACCUMULATING_KEYS = frozenset({"class"})


class UIError(Exception):
    pass


class NoUIModel(UIError):
    pass


class CycleError(UIError):
    def __init__(self, path):
        super().__init__(" -> ".join(render_term(t) for t in path))
        self.path = path


class DuplicateId(UIError):
    pass


class UnknownWidgetType(UIError):
    pass


@dataclass
class WhenHandler:
    element: Term
    event: Term
    action: str
    operand: Term


@dataclass
class UINode:
    id: Term
    widget_type: str
    attributes: list = field(default_factory=list)  # of (key Term, value Term)
    handlers: list = field(default_factory=list)  # of WhenHandler
    children: list = field(default_factory=list)


@dataclass
class UITree:
    roots: list = field(default_factory=list)

    def nodes(self):
        stack = list(self.roots)
        while stack:
            node = stack.pop()
            yield node
            stack.extend(node.children)


def evaluate_external_concat(args) -> QuotedString:
    """String concatenation of the arguments' unquoted renderings."""
    return concat(tuple(args))


def build_ui_atoms(ui_files: ProgramBundle, snapshot_facts: str,
                   bridge: SolverBridge | None = None) -> set:
    """Solve the UI encoding against the domain-state facts.

    Returns the elem/3, attr/3 and when/4 atoms of the stable model.  The
    encoding is expected to have exactly one model; with more, the first
    (under the deterministic solver configuration) is used and a warning
    is logged.
    """
    bridge = bridge or SolverBridge()
    bundle = ui_files.extended("<domain-state>", snapshot_facts)
    outcome = bridge.solve(SolveRequest(program=bundle, mode=SolveMode("models", 2)))
    if outcome.status != "sat":
        raise NoUIModel("the UI encoding is unsatisfiable for this domain state")
    if len(outcome.models) > 1:
        log.warning("UI encoding has more than one stable model; using the first")
    atoms = outcome.models[0]
    keep = set()
    for atom in atoms:
        if isinstance(atom, Function) and (
            (atom.name == "elem" and len(atom.args) == 3)
            or (atom.name == "attr" and len(atom.args) == 3)
            or (atom.name == "when" and len(atom.args) == 4)
        ):
            keep.add(atom)
    return keep


def assemble_tree(atoms) -> UITree:
    """Build and validate the widget tree from elem/attr/when atoms."""
    nodes: dict = {}
    parents: dict = {}
    for atom in sorted(atoms, key=term_sort_key):
        if not isinstance(atom, Function) or atom.name != "elem":
            continue
        elem_id, wtype, parent = atom.args
        if elem_id == ROOT_ID:
            raise DuplicateId("an element may not use the reserved id 'root'")
        if elem_id in nodes:
            raise DuplicateId(render_term(elem_id))
        if not isinstance(wtype, Constant) or wtype.name not in WIDGET_TYPES:
            raise UnknownWidgetType(render_term(wtype))
        nodes[elem_id] = UINode(id=elem_id, widget_type=wtype.name)
        parents[elem_id] = parent

    _check_acyclic(parents)
    reachable = {
        eid for eid in nodes if _reaches_root(eid, parents, nodes)
    }
    for eid in set(nodes) - reachable:
        log.warning("dropping element %s: parent chain does not reach root", render_term(eid))
    nodes = {eid: nodes[eid] for eid in reachable}

    for eid, node in nodes.items():
        if node.widget_type == "dropdown_menu_item":
            parent = nodes.get(parents[eid])
            if parent is None or parent.widget_type != "dropdown_menu":
                raise UIError(
                    f"dropdown_menu_item {render_term(eid)} must sit inside a dropdown_menu"
                )

    _attach_attributes(atoms, nodes)
    _attach_handlers(atoms, nodes)

    tree = UITree()
    for eid, node in nodes.items():
        parent = parents[eid]
        if parent == ROOT_ID:
            tree.roots.append(node)
        else:
            nodes[parent].children.append(node)
    for node in nodes.values():
        node.children.sort(key=_sibling_key)
    tree.roots.sort(key=_sibling_key)
    return tree


def _check_acyclic(parents: dict):
    for start in parents:
        seen = []
        current = start
        while current in parents:
            if current in seen:
                raise CycleError(seen[seen.index(current) :])
            seen.append(current)
            current = parents[current]


def _reaches_root(eid, parents, nodes) -> bool:
    current = eid
    while True:
        parent = parents[current]
        if parent == ROOT_ID:
            return True
        if parent not in nodes:
            return False
        current = parent


def _attach_attributes(atoms, nodes):
    collected: dict = {}
    for atom in sorted(atoms, key=term_sort_key):
        if not isinstance(atom, Function) or atom.name != "attr":
            continue
        element, key, value = atom.args
        if element not in nodes:
            log.warning("dropping attr for unknown element %s", render_term(element))
            continue
        collected.setdefault((element, key), []).append(value)
    for (element, key), values in collected.items():
        key_name = key.name if isinstance(key, Constant) else None
        if key_name in ACCUMULATING_KEYS:
            for value in values:  # already in term order
                nodes[element].attributes.append((key, value))
        else:
            if len(values) > 1:
                log.warning(
                    "conflicting values for attribute %s of %s; keeping %s",
                    render_term(key), render_term(element), render_term(values[-1]),
                )
            nodes[element].attributes.append((key, values[-1]))
    for node in nodes.values():
        node.attributes.sort(key=lambda kv: (term_sort_key(kv[0]), term_sort_key(kv[1])))


def _attach_handlers(atoms, nodes):
    for atom in sorted(atoms, key=term_sort_key):
        if not isinstance(atom, Function) or atom.name != "when":
            continue
        element, event, action, operand = atom.args
        if element not in nodes:
            log.warning("dropping when for unknown element %s", render_term(element))
            continue
        if not isinstance(action, Constant) or action.name not in ACTIONS:
            log.warning("dropping when with unknown action %s", render_term(action))
            continue
        if action.name == "update":
            target_ok = (
                hasattr(operand, "args")
                and len(getattr(operand, "args", ())) == 3
                and operand.args[0] in nodes
            )
            if not target_ok:
                log.warning("dropping update handler with unknown target: %s", render_term(operand))
                continue
        nodes[element].handlers.append(
            WhenHandler(element=element, event=event, action=action.name, operand=operand)
        )
    for node in nodes.values():
        node.handlers.sort(
            key=lambda h: (term_sort_key(h.event), h.action, term_sort_key(h.operand))
        )


def _sibling_key(node: UINode):
    order = None
    for key, value in node.attributes:
        if isinstance(key, Constant) and key.name == "order":
            order = value
    if order is not None:
        return (0, term_sort_key(order), term_sort_key(node.id))
    return (1, (), term_sort_key(node.id))


# ---------------------------------------------------------------------------
# Wire format


def tree_to_json_obj(tree: UITree) -> dict:
    return {
        "id": "root",
        "type": "root",
        "attributes": [],
        "when": [],
        "children": [_node_obj(n) for n in tree.roots],
    }


def _node_obj(node: UINode) -> dict:
    return {
        "id": render_term(node.id),
        "type": node.widget_type,
        "attributes": [
            {"key": render_term(k), "value": render_term(v)} for k, v in node.attributes
        ],
        "when": [
            {"event": render_term(h.event), "action": h.action, "operand": render_term(h.operand)}
            for h in node.handlers
        ],
        "children": [_node_obj(c) for c in node.children],
    }


def serialize_tree(tree: UITree) -> str:
    """Byte-deterministic JSON for a validated tree."""
    return json.dumps(tree_to_json_obj(tree), ensure_ascii=False, separators=(",", ":"))


def deserialize_tree(text: str) -> UITree:
    """Parse wire JSON back into a UITree (used for round-trip checks)."""
    obj = json.loads(text)

    def node(o) -> UINode:
        n = UINode(id=parse_term(o["id"]), widget_type=o["type"])
        n.attributes = [(parse_term(a["key"]), parse_term(a["value"])) for a in o["attributes"]]
        n.handlers = [
            WhenHandler(
                element=n.id,
                event=parse_term(w["event"]),
                action=w["action"],
                operand=parse_term(w["operand"]),
            )
            for w in o["when"]
        ]
        n.children = [node(c) for c in o["children"]]
        return n

    return UITree(roots=[node(c) for c in obj["children"]])
