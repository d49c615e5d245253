"""Variant knowledge-graph workbench.

Converts annotated VCF / CADD / metadata files into an RDF knowledge graph
with one named graph per patient accession, queries it with an embedded
SPARQL-subset engine, and trains GCN / GraphSAGE node classifiers on
integer-encoded graphs built from query results.
"""

__version__ = "0.1.0"
