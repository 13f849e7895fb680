"""Classical and community-aware centrality measures on modular networks."""

from .graph import Graph, load_edge_list, read_edge_list
from .partition import Partition, louvain, mixing_parameter, modularity

__version__ = "0.1.0"

__all__ = ["Graph", "Partition", "load_edge_list", "read_edge_list", "louvain",
           "mixing_parameter", "modularity", "__version__"]
