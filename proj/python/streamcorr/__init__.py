from ._streamcorr import (
    Cluster,
    Store,
    coefficient,
    connected_components,
    detect_static,
    generate_stream,
    jaccard,
    leaf_distance,
    neighbor_joining,
    run_pipeline,
    search,
    stream_tree,
    tree_distance,
    windows_for,
    write_edge_file,
)

__all__ = [
    "Cluster",
    "Store",
    "coefficient",
    "connected_components",
    "detect_static",
    "generate_stream",
    "jaccard",
    "leaf_distance",
    "neighbor_joining",
    "run_pipeline",
    "search",
    "stream_tree",
    "tree_distance",
    "windows_for",
    "write_edge_file",
]
