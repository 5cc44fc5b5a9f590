from .asdim import build_asdim_witness_graph_product
from .bricks import BrickColouring, CliqueBaseCover, build_base_cover
from .certificate import CoverCertificate, verify_certificate
from .families import (LatticeMetric, SetFamily, VertexGroupMetric, covers, diameter, is_r_disjoint,
                       mesh, saturated_union, set_distance, translate_family)
from .trees import RootedTree, YrTree, build_Yr_tree, check_tree_quasi_isometry, tree_cover
