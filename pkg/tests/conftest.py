import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rainbowlab import make_graph


def cycle_graph(n):
    return make_graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n):
    return make_graph(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n):
    return make_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


@pytest.fixture(scope="session")
def atlas_catalog():
    """All 143 connected graphs on 1..6 vertices, from the networkx atlas."""
    import networkx as nx
    from networkx.generators.atlas import graph_atlas_g

    graphs = []
    for G in graph_atlas_g():
        n = G.number_of_nodes()
        if 1 <= n <= 6 and nx.is_connected(G):
            mapping = {v: i for i, v in enumerate(G.nodes())}
            graphs.append(make_graph(n, [(mapping[u], mapping[v]) for u, v in G.edges()]))
    assert len(graphs) == 143
    return graphs
