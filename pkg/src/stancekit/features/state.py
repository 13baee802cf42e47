"""State-level network and aggregated user features."""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np
import pandas as pd

from ..graph import EndorsementGraph, out_edge_induced_subgraph
from ..ingest import STATE_CODES
from .graph_metrics import average_clustering, degree_assortativity, density, gini
from .matrix import FeatureMatrix

CONTROL, RIGHTS = "control", "rights"


def _side_share(nodes: Iterable[str], side_of: Mapping[str, str]) -> float | None:
    known = [side_of[u] for u in nodes if side_of.get(u) in (CONTROL, RIGHTS)]
    if not known:
        return None
    return sum(s == RIGHTS for s in known) / len(known)


def subgraph_metrics(g: EndorsementGraph, members: set[str], prefix: str) -> dict[str, float | None]:
    """Size, clustering and density on the induced and out-edge-induced subgraphs,
    plus max weight, assortativity and in-degree Gini on the induced one."""
    sub = g.subgraph(members)
    eig = out_edge_induced_subgraph(g, members)
    n = len(sub.nodes)
    weights = [w for _, _, w in sub.edges()]
    return {
        f"{prefix}nodes": float(n),
        f"{prefix}edges": float(sub.n_edges),
        f"{prefix}clustering": average_clustering(sub),
        f"{prefix}density": density(sub),
        f"{prefix}nodes_eig": float(len(eig.nodes)),
        f"{prefix}edges_eig": float(eig.n_edges),
        f"{prefix}clustering_eig": average_clustering(eig),
        f"{prefix}density_eig": density(eig),
        f"{prefix}max_weight": float(max(weights)) if weights else None,
        f"{prefix}assortativity": degree_assortativity(sub),
        f"{prefix}gini_in_degree": gini([sub.in_degree(u) for u in sub.nodes]) if n else None,
    }


def state_network_features(
    g: EndorsementGraph,
    state_of: Mapping[str, str | None],
    side_of: Mapping[str, str],
    states: Iterable[str] = STATE_CODES,
) -> FeatureMatrix:
    """Per-state metrics of the in-state subgraph, overall and per side.

    ``net_rights_prop`` is the share of side-labelled in-state nodes on the
    rights side; ``net_prop_deviation`` is its absolute distance from the
    same share over the whole graph.
    """
    members: dict[str, set[str]] = {s: set() for s in states}
    for u in g.nodes:
        s = state_of.get(u)
        if s in members:
            members[s].add(u)
    global_share = _side_share(g.nodes, side_of)
    rows = {}
    for s, nodes in members.items():
        row = subgraph_metrics(g, nodes, "net_")
        for side in (CONTROL, RIGHTS):
            row.update(subgraph_metrics(g, {u for u in nodes if side_of.get(u) == side}, f"net_{side}_"))
        share = _side_share(nodes, side_of)
        row["net_rights_prop"] = share
        row["net_prop_deviation"] = None if share is None or global_share is None else abs(share - global_share)
        rows[s] = {k: (np.nan if v is None else v) for k, v in row.items()}
    frame = pd.DataFrame.from_dict(rows, orient="index").sort_index()
    frame.index.name = "key"
    return FeatureMatrix(frame, dict.fromkeys(frame.columns, "network"))


def state_user_averages(
    users: FeatureMatrix,
    state_of: Mapping[str, str | None],
    side_of: Mapping[str, str],
    states: Iterable[str] = STATE_CODES,
    exclude_tags: Iterable[str] = ("network", "liwc"),
) -> FeatureMatrix:
    """Average user-level columns over each state's users, overall and per side (``avg_``, ``avg_<side>_``)."""
    skip = set(exclude_tags)
    cols = [c for c in users.columns if users.provenance[c] not in skip]
    frame = users.frame[cols]
    state = np.array([state_of.get(u) for u in frame.index], dtype=object)
    side = np.array([side_of.get(u) for u in frame.index], dtype=object)
    states = sorted(states)
    parts, prov = [], {}
    for label, keep in (("", np.ones(len(frame), dtype=bool)), (f"{CONTROL}_", side == CONTROL), (f"{RIGHTS}_", side == RIGHTS)):
        names = [f"avg_{label}{c}" for c in cols]
        sub = frame[keep]
        means = sub.groupby(state[keep]).mean().reindex(states) if len(sub) else pd.DataFrame(index=states, columns=cols)
        means.columns = names
        prov.update({n: users.provenance[c] for n, c in zip(names, cols)})
        parts.append(means.astype(np.float64))
    out = pd.concat(parts, axis=1)
    out.index.name = "key"
    return FeatureMatrix(out, prov)
