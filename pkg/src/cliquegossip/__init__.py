"""Clique-gossip averaging protocols: coverages, spectra, finite-time schedules."""
from .graph import (CliqueCoverage, CoverageError, Graph, GraphError, LineGraph, ParseError,
                    build_graph, complete_graph, cyclic_vertices, line_graph, load_instance,
                    validate_coverage)
from .protocol import TransitionMatrix, apply, averaging_transition, solver_transition
from .scheduler import (InfeasibleError, Schedule, ScheduleError, clique_select, lattice_schedule,
                        min_steps, multi_factor_schedule, regular_feasible)
from .spectrum import (SwapCondition, check_convergence, convergence_rate, eigenvalues,
                       period_matrix, spectra_equal, swap_condition)
from .sim import class_bounds, consensus_time, error_trajectory, greedy_classes, run

__version__ = "0.1.0"
