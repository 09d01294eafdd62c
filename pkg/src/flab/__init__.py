"""flab: does this 3-manifold group fibre?

A library and CLI for deciding fibredness of 3-manifolds from finite
presentations of their fundamental groups: Brown's algorithm for one-relator
groups, Fox-calculus Alexander polynomials, Todd-Coxeter coset enumeration,
Reidemeister-Schreier rewriting, Stallings foldings with the ascending-HNN
criterion, Dehn filling, and co-rank obstructions.
"""

from .abelian import (AbelianStructure, Character, IntMatrix, SmithDecomposition,
                      abelianization, is_simple_form, primitive_characters,
                      smith_normal_form, to_standard_form)
from .brown import (ConeReport, HeightWalk, LatticePath, brown_quotient,
                    brown_rank1, brown_rank2, punctured_torus_bundle_test)
from .cosets import (CosetTable, SubgroupPresentation, cyclic_cover,
                     low_index_subgroups, reidemeister_schreier,
                     simplify_presentation, simplify_subgroup, subgroup_counts,
                     subgroup_homology, todd_coxeter)
from .errors import FlabError
from .foldings import (FoldedGraph, ascending_hnn_check, build_folded_graph,
                       concat_double_relators, descent_check,
                       extract_fiber_subwords, generates_whole, graph_membership,
                       is_basis)
from .fox import (AlexanderData, GroupRingElem, abelian_eval, alexander_matrix,
                  alexander_polynomial, fibred_obstructions, fox_derivative,
                  simple_form_data)
from .laurent import (LaurentPoly, change_variables, exact_div, laurent_gcd,
                      laurent_predicates, newton_vertices, normalize_units,
                      render, unit_equal)
from .pipeline import (BatchOpts, CorankOpts, CorankReport, DecideOpts,
                       FibredVerdict, corank_bounds, decide_fibred, dehn_fill,
                       emit_plot, run_batch, verify_fibred_certificate)
from .presentations import (Flags, Generator, Presentation, TietzeLog,
                            format_presentation, parse_presentation,
                            parse_presentations, presentation, substitute)
from .words import (Word, cyclic_reduce, exponent_vector, free_reduce,
                    parse_word, print_word)

__version__ = "0.1.0"
