# -*- coding: utf-8 -*-
"""
Created on Wed Sep 16 08:55:26 2026

@author: compamg developers

Modularity matching coarsening. Vertices are grouped into aggregates
(communities) by recursive rounds of Luby's local-maximum matching on the
modularity weights b_ij = a_ij - r_i r_j / T of a strength graph built from
the matrix and near-null candidates.
"""

import warnings
import numpy as np
import networkx as nx
import scipy.sparse as sp

from compamg.sparse_core import to_csr, triple_product


class ModularityGraph:
    '''
    Weighted graph with its rowsums and total weight. The modularity matrix
    B = adjacency - r r^T / T is only evaluated on stored edges
    '''

    def __init__(self, adjacency):
        '''
        (scipy.sparse.csr_matrix) -> None

        :param adjacency: Symmetric weighted adjacency matrix. Diagonal entries are
                          self loops and only enter the rowsums
        '''

        self.adjacency = to_csr(adjacency)
        self.rowsums = np.asarray(self.adjacency.sum(axis=1)).ravel()
        self.total = float(self.rowsums.sum())

    def __len__(self):
        return self.adjacency.shape[0]

    def edges(self):
        '''
        (None) -> (numpy.ndarray, numpy.ndarray, numpy.ndarray)

        Return the arrays (i, j, b_ij) of the off-diagonal edges with i < j
        '''

        upper = sp.triu(self.adjacency, k=1).tocoo()
        i, j = upper.row.astype(np.int64), upper.col.astype(np.int64)
        return i, j, upper.data - self.rowsums[i] * self.rowsums[j] / self.total

    def coarsen(self, agg):
        '''
        (Aggregation) -> ModularityGraph

        :param agg: Aggregation of the vertices

        Return the graph of the aggregates, P^T adjacency P. The coarse rowsums are
        P^T r and the total is unchanged
        '''

        return ModularityGraph(triple_product(piecewise_constant_P(agg), self.adjacency))


class Aggregation:
    '''
    Surjective map from vertices to aggregates
    '''

    def __init__(self, vertex_to_agg):
        '''
        (numpy.ndarray) -> None

        :param vertex_to_agg: Aggregate index of every vertex
        '''

        self.vertex_to_agg = np.asarray(vertex_to_agg, dtype=np.int64)
        self.n_agg = int(self.vertex_to_agg.max()) + 1 if len(self.vertex_to_agg) else 0
        # set by aggregate() when the strength graph cannot be coarsened
        self.disconnected = False

    def __len__(self):
        return len(self.vertex_to_agg)

    def sizes(self):
        '''
        (None) -> numpy.ndarray

        Return the number of vertices in each aggregate
        '''

        return np.bincount(self.vertex_to_agg, minlength=self.n_agg)

    def members(self):
        '''
        (None) -> list

        Return a list with the sorted vertex indices of each aggregate
        '''

        order = np.argsort(self.vertex_to_agg, kind='stable')
        return np.split(order, np.cumsum(self.sizes())[:-1])

    def check(self):
        '''
        (None) -> None

        Raise a ValueError if the map is not onto 0..n_agg-1
        '''

        if len(self) == 0:
            return
        if self.vertex_to_agg.min() < 0 or np.any(self.sizes() == 0):
            raise ValueError('ERR: Aggregation is not surjective onto 0..{0}'.format(self.n_agg - 1))

    @classmethod
    def singletons(cls, n):
        return cls(np.arange(n))

    @classmethod
    def from_blocks(cls, block_offsets):
        '''
        (numpy.ndarray) -> Aggregation

        Return the aggregation grouping the indices of each block
        '''

        return cls(np.repeat(np.arange(len(block_offsets) - 1), np.diff(block_offsets)))


def strength_graph(A, W, combine='sum'):
    '''
    (scipy.sparse.csr_matrix, numpy.ndarray, str) -> scipy.sparse.csr_matrix

    :param A: Symmetric matrix
    :param W: Candidate vectors, one per column (a 1-D array is one candidate)
    :param combine: How the candidate contributions are combined:
                    'sum', 'max' or 'first'

    Return the strength matrix with entries -w_i a_ij w_j off the diagonal and a
    zero diagonal
    '''

    W = np.asarray(W, dtype=np.float64)
    if W.ndim == 1:
        W = W[:, None]
    if W.shape[0] != A.shape[0] or W.shape[1] < 1:
        raise ValueError('ERR: Candidates must have {0} rows and at least one column'.format(A.shape[0]))
    if np.any(np.all(W == 0, axis=0)):
        raise ValueError('ERR: All-zero candidate column')
    if combine not in ['sum', 'max', 'first']:
        raise ValueError('ERR: Unknown candidate combination {0}'.format(combine))

    coo = sp.triu(A, k=1).tocoo()
    i, j = coo.row, coo.col
    contributions = -W[i, :] * coo.data[:, None] * W[j, :]
    if combine == 'sum':
        weights = contributions.sum(axis=1)
    elif combine == 'max':
        weights = contributions.max(axis=1)
    else:
        weights = contributions[:, 0]
    upper = sp.coo_matrix((weights, (i, j)), shape=A.shape)
    return to_csr(upper + upper.T)


def modularity_graph(strength):
    '''
    (scipy.sparse.csr_matrix) -> ModularityGraph

    :param strength: Strength matrix with zero diagonal

    Return the modularity graph of the strength matrix. A vertex with a
    non-positive rowsum gets a self loop cancelling it, so that it contributes
    r_i = 0 to T and its edges keep their raw weight as modularity weight
    '''

    rowsums = np.asarray(strength.sum(axis=1)).ravel()
    deficit = np.where(rowsums <= 0, -rowsums, 0.0)
    return ModularityGraph(strength + sp.diags(deficit))


def modularity_weight(G, i, j):
    '''
    (ModularityGraph, int, int) -> float

    :param G: Modularity graph
    :param i: Vertex
    :param j: Vertex, (i, j) is a stored edge

    Return the modularity weight b_ij = a_ij - r_i r_j / T
    '''

    if G.total <= 0:
        raise ValueError('ERR: Total weight of the graph must be positive')
    return float(G.adjacency[i, j] - G.rowsums[i] * G.rowsums[j] / G.total)


def modularity_functional(G, agg):
    '''
    (ModularityGraph, Aggregation) -> float

    :param G: Modularity graph
    :param agg: Aggregation covering all vertices

    Return Q = (1/T) sum over aggregates of sum_{i,j in aggregate} b_ij,
    diagonal terms included. The self loops cancelling non-positive rowsums
    (modularity_graph) enter b_ii like any diagonal entry, which keeps Q = 0 for
    the single aggregate
    '''

    P = piecewise_constant_P(agg)
    inside = triple_product(P, G.adjacency).diagonal().sum()
    r_c = P.T @ G.rowsums
    return float((inside - np.dot(r_c, r_c) / G.total) / G.total)


def modularity_networkx(G, agg):
    '''
    (ModularityGraph, Aggregation) -> float

    :param G: Modularity graph without self loops
    :param agg: Aggregation covering all vertices

    Return the modularity of the partition computed by networkx. It equals
    modularity_functional when the graph has no self loops
    '''

    graph = nx.Graph()
    graph.add_nodes_from(range(len(G)))
    upper = sp.triu(G.adjacency, k=1).tocoo()
    graph.add_weighted_edges_from(zip(upper.row.tolist(), upper.col.tolist(), upper.data.tolist()))
    communities = [set(m.tolist()) for m in agg.members()]
    return float(nx.algorithms.community.modularity(graph, communities, weight='weight'))


def edge_ranks(i, j, b):
    '''
    (numpy.ndarray, numpy.ndarray, numpy.ndarray) -> numpy.ndarray

    Return the rank of each edge in the strict total order used by the matching:
    larger weight first, ties won by the lexicographically smallest (i, j)
    '''

    order = np.lexsort((j, i, -b))
    ranks = np.empty(len(b), dtype=np.int64)
    ranks[order] = np.arange(len(b))
    return ranks


def local_maxima(n, i, j, b):
    '''
    (int, numpy.ndarray, numpy.ndarray, numpy.ndarray) -> numpy.ndarray

    :param n: Number of vertices
    :param i: First endpoints
    :param j: Second endpoints
    :param b: Edge weights

    Return a boolean mask of the edges with positive weight that beat every
    other edge sharing a vertex with them
    '''

    if len(b) == 0:
        return np.zeros(0, dtype=bool)
    ranks = edge_ranks(i, j, b)
    # best (smallest rank) edge at every vertex
    best = np.full(n, len(b), dtype=np.int64)
    np.minimum.at(best, i, ranks)
    np.minimum.at(best, j, ranks)
    return (b > 0) & (best[i] == ranks) & (best[j] == ranks)


def luby_match(G):
    '''
    (ModularityGraph) -> numpy.ndarray

    :param G: Modularity graph

    Return a (k, 2) array of matched vertex pairs (i < j) from one round of the
    local-maximum rule: an edge is matched if its modularity weight is positive and
    strictly exceeds the weight of every neighboring edge
    '''

    i, j, b = G.edges()
    keep = local_maxima(len(G), i, j, b)
    return np.column_stack([i[keep], j[keep]])


def luby_maximal_match(G):
    '''
    (ModularityGraph) -> numpy.ndarray

    :param G: Modularity graph

    Return a (k, 2) array of matched pairs. Rounds of the local-maximum rule are
    repeated on the edges between still unmatched vertices until no positive
    edge remains between them
    '''

    i, j, b = G.edges()
    positive = b > 0
    i, j, b = i[positive], j[positive], b[positive]
    matched = np.zeros(len(G), dtype=bool)
    pairs = []
    while len(b) > 0:
        keep = local_maxima(len(G), i, j, b)
        pairs.append(np.column_stack([i[keep], j[keep]]))
        matched[i[keep]] = True
        matched[j[keep]] = True
        free = ~matched[i] & ~matched[j]
        i, j, b = i[free], j[free], b[free]
    if len(pairs) == 0:
        return np.zeros((0, 2), dtype=np.int64)
    return np.concatenate(pairs)


def merge_pairs(n, pairs):
    '''
    (int, numpy.ndarray) -> numpy.ndarray

    :param n: Number of vertices
    :param pairs: Disjoint vertex pairs

    Return the new contiguous label of each vertex, the two vertices of a pair
    sharing a label
    '''

    parent = np.arange(n)
    if len(pairs) != 0:
        parent[pairs[:, 1]] = pairs[:, 0]
    _, labels = np.unique(parent, return_inverse=True)
    return labels


def aggregate(A, W, gamma=4.0, initial=None, combine='sum', matching='maximal'):
    '''
    (scipy.sparse.csr_matrix, numpy.ndarray, float, Aggregation | None, str, str) -> Aggregation

    :param A: Symmetric matrix
    :param W: Near-null candidates, one per column
    :param gamma: Target coarsening factor, >= 2
    :param initial: Starting aggregation. Singletons if None
    :param combine: Combination of the candidate contributions in the strength graph
    :param matching: 'maximal' (repeat the local-maximum rule until no positive edge
                     is left between unmatched vertices) or 'single' (one round)

    Return the aggregation obtained by merging matched aggregates of the successive
    coarse strength graphs until len(A) / n_agg >= gamma or a round matches nothing.
    The attributes rounds, history (list of (n_agg, Q) per round), defects (zero-rowsum
    defect of every coarse graph matched) and disconnected describe the run
    '''

    if gamma < 2:
        raise ValueError('ERR: Coarsening factor must be >= 2')
    if matching not in ['maximal', 'single']:
        raise ValueError('ERR: Unknown matching {0}'.format(matching))
    match = luby_maximal_match if matching == 'maximal' else luby_match

    n = A.shape[0]
    fine = modularity_graph(strength_graph(A, W, combine))
    agg = Aggregation.singletons(n) if initial is None else Aggregation(initial.vertex_to_agg)

    if fine.total <= 0:
        warnings.warn('strength graph has no positive weight, keeping the starting aggregation', RuntimeWarning)
        agg.disconnected = True
        agg.rounds, agg.history, agg.defects = 0, [], []
        return agg

    rounds, history, defects = 0, [], []
    while n / agg.n_agg < gamma:
        coarse = fine.coarsen(agg)
        defects.append(coarse_zero_rowsum_defect(coarse))
        pairs = match(coarse)
        if len(pairs) == 0:
            break
        agg = Aggregation(merge_pairs(agg.n_agg, pairs)[agg.vertex_to_agg])
        rounds += 1
        history.append((agg.n_agg, modularity_functional(fine, agg)))

    agg.rounds, agg.history, agg.defects = rounds, history, defects
    return agg


def piecewise_constant_P(agg):
    '''
    (Aggregation) -> scipy.sparse.csr_matrix

    :param agg: Aggregation

    Return the n x n_agg 0-1 matrix with a single unit entry per row at the
    column of the vertex aggregate
    '''

    n = len(agg)
    P = sp.csr_matrix((np.ones(n), agg.vertex_to_agg, np.arange(n + 1)), shape=(n, agg.n_agg))
    return to_csr(P)


def coarse_zero_rowsum_defect(G):
    '''
    (ModularityGraph) -> float

    Return max_i |sum_j b_ij|, zero up to rounding for any graph whose rowsums
    are those of its adjacency
    '''

    B1 = np.asarray(G.adjacency.sum(axis=1)).ravel() - G.rowsums * G.rowsums.sum() / G.total
    return float(np.abs(B1).max()) if len(B1) else 0.0


def write_aggregation(agg, outputfile):
    '''
    (Aggregation, str) -> None

    :param agg: Aggregation
    :param outputfile: Path to the output text file

    Write one 'vertex_index aggregate_index' line per vertex
    '''

    with open(outputfile, 'w') as newfile:
        for vertex, group in enumerate(agg.vertex_to_agg):
            newfile.write('{0} {1}\n'.format(vertex, group))
