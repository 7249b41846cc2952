"""Hand-frozen example graphs shared across test modules."""

from __future__ import annotations

from graphchains.graphcore import BipartiteInstance, DegreeSequence, LabeledGraph, PamInstance

# Two-class example: 6 vertices of degree 3 (class one, labels 0..5) and
# 5 vertices of degree 4 (class two, labels 6..10) with edge-count matrix
# ((7, 4), (4, 8)).  The 19-edge realization below is checked by hand.
JDM_EXAMPLE = PamInstance(n1=6, n2=5, c11=7, c12=4, c22=8, d=(3,) * 6 + (4,) * 5)

JDM_EXAMPLE_EDGES = [
    # internal, class one
    (0, 1), (0, 2), (0, 5), (1, 2), (1, 5), (2, 5), (3, 4),
    # internal, class two
    (6, 7), (6, 9), (6, 10), (7, 8), (7, 9), (7, 10), (8, 9), (9, 10),
    # cut
    (4, 8), (4, 10), (3, 6), (3, 8),
]


def jdm_example_graph() -> LabeledGraph:
    return LabeledGraph(11, JDM_EXAMPLE_EDGES)


# A worked symmetric-difference example used by the canonical-path tests:
# three circuits.  C1 (labels 0..3) and C3 (labels 12..15) are alternating
# 4-cycles; C2 (labels 4..11) is a 10-edge figure-eight through vertex 4
# (visited twice via 4-7 and 11-4) and vertex 8 (visited twice).
#
#   walk of C2: 4 5 6 4 7 8 9 10 8 11 4
#
# Blue edges belong to G, red edges to G2.
JS_FIGURE_BLUE = [
    (0, 1), (2, 3),            # C1
    (4, 5), (4, 6), (7, 8), (9, 10), (8, 11),   # C2
    (12, 13), (14, 15),        # C3
]
JS_FIGURE_RED = [
    (1, 2), (0, 3),            # C1
    (5, 6), (4, 7), (8, 9), (8, 10), (4, 11),   # C2
    (13, 14), (12, 15),        # C3
]

JS_FIGURE_D = DegreeSequence(
    (1, 1, 1, 1, 2, 1, 1, 1, 2, 1, 1, 1, 1, 1, 1, 1)
)


def js_figure_graphs() -> tuple[LabeledGraph, LabeledGraph]:
    return LabeledGraph(16, JS_FIGURE_BLUE), LabeledGraph(16, JS_FIGURE_RED)


# The pairing drawn in the figure: vertex 4 pairs blue (4,5) with red (4,11)
# and blue (4,6) with red (4,7); vertex 8 pairs blue (7,8) with red (8,9) and
# blue (8,11) with red (8,10).  All other vertices have a forced pairing.
JS_FIGURE_PAIRING_CHOICES = {
    4: [((4, 5), (4, 11)), ((4, 6), (4, 7))],
    8: [((7, 8), (8, 9)), ((8, 11), (8, 10))],
}

# The canonical walk of C2 under that pairing, starting from the smallest
# blue edge (4,5) out of its smaller endpoint.
JS_FIGURE_C2_WALK = (4, 5, 6, 4, 7, 8, 9, 10, 8, 11, 4)


def small_bipartite() -> BipartiteInstance:
    return BipartiteInstance((1, 1), (1, 1))


# Two-class example for the hinge-path tests: 24 vertices of degree one,
# class one is 0..13, class two is 14..23, counts c11=5, c12=4, c22=3.
# Blue and red are perfect matchings; their difference splits into two
# internal 4-cycles and one 16-cycle that weaves across the class cut.
PAM_PATH_INSTANCE = PamInstance(n1=14, n2=10, c11=5, c12=4, c22=3, d=(1,) * 24)

PAM_PATH_BLUE = [
    (0, 1), (2, 3),
    (4, 14), (5, 15), (16, 17), (6, 7), (8, 18), (19, 20), (9, 21), (10, 11),
    (12, 13), (22, 23),
]
PAM_PATH_RED = [
    (1, 2), (0, 3),
    (14, 15), (5, 16), (6, 17), (7, 8), (18, 19), (20, 21), (9, 10), (4, 11),
    (13, 22), (12, 23),
]


def pam_path_graphs() -> tuple[LabeledGraph, LabeledGraph]:
    return LabeledGraph(24, PAM_PATH_BLUE), LabeledGraph(24, PAM_PATH_RED)


# All degrees are one, so the pairing is forced; the values below were
# walked through by hand once and frozen.
PAM_PATH_WALKS = [
    (0, 1, 2, 3, 0),
    (4, 14, 15, 5, 16, 17, 6, 7, 8, 18, 19, 20, 21, 9, 10, 11, 4),
    (12, 13, 22, 23, 12),
]
PAM_PATH_SECTION_CHANGES = [0, -1, 1, -1, -1, 0, 1, 1]
PAM_PATH_SEGMENT_WALKS = [
    ((0, 1, 2, 3, 0), (4, 14, 15)),
    ((15, 5, 16, 17, 6),),
    ((6, 7, 8, 18, 19),),
    ((19, 20, 21, 9, 10),),
    ((10, 11, 4), (12, 13, 22)),
    ((22, 23, 12),),
]
PAM_PATH_PROFILE = (0, -1, 0, -1, -2, -1, 0)
PAM_PATH_PIECES = [(0, 2, "valley", 1), (2, 6, "valley", 4)]
PAM_PATH_TRAVERSALS = [((0, 1), (1, 2)), ((2, 4), (3, 5), (4, 6))]
PAM_PATH_FLIPS = 12

# Transition at flip index 9 and its complementary encoding.
PAM_PATH_TAU_INDEX = 9
PAM_PATH_TAU = ((19, 20), (20, 21))  # removed, added
PAM_PATH_Z_BEFORE_TAU = [
    (0, 3), (1, 2), (4, 11), (5, 16), (6, 17), (7, 8), (9, 21), (13, 22),
    (14, 15), (18, 19), (19, 20), (22, 23),
]
PAM_PATH_ENCODING = [
    (0, 1), (2, 3), (4, 14), (5, 15), (6, 7), (8, 18), (9, 10), (10, 11),
    (12, 13), (12, 23), (16, 17), (20, 21),
]
PAM_PATH_ENCODING_ALPHA = {10: -1, 12: -1, 19: 1, 22: 1}

# A profile shaped like the two-pointer walk illustration: one mountain
# with local notches on both slopes.  Its frozen traversal shows the
# down-then-up detours around the notches.
MOUNTAIN_HEIGHTS = (0, 1, 2, 3, 2, 3, 4, 3, 4, 3, 2, 1, 2, 1, 0)
MOUNTAIN_TOP = 6
MOUNTAIN_TRAVERSAL = (
    (0, 6), (1, 7), (0, 8), (1, 9), (2, 10), (3, 11), (4, 12), (5, 13), (6, 14),
)

# Regression difference: a ten-edge circuit that revisits the smaller
# endpoint of its smallest blue edge at an even walk position, so the
# naive start choice would schedule a repair move pivoting on a deficient
# vertex.  Degrees of either side: (2, 2, 1, 2, 1, 1, 1).
ANCHOR_REGRESSION_BLUE = [(0, 3), (2, 6), (1, 3), (0, 5), (1, 4)]
ANCHOR_REGRESSION_RED = [(3, 6), (2, 3), (0, 1), (1, 5), (0, 4)]
ANCHOR_REGRESSION_D = DegreeSequence((2, 2, 1, 2, 1, 1, 1))


def anchor_regression_graphs() -> tuple[LabeledGraph, LabeledGraph]:
    return LabeledGraph(7, ANCHOR_REGRESSION_BLUE), LabeledGraph(7, ANCHOR_REGRESSION_RED)
