#!/usr/bin/env python3
"""End-to-end demo on a synthetic cohort: enrich -> fetch -> graph -> train
-> inference, entirely in-process against a throwaway workspace."""

import argparse
import tempfile
from pathlib import Path

from vargraph.cohort import make_cohort
from vargraph.gnn import ModelConfig
from vargraph.mlgraph import GraphRecipe
from vargraph.workbench import Workbench


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--accessions", type=int, default=5)
    parser.add_argument("--variants", type=int, default=40)
    parser.add_argument("--model", choices=("gcn", "sage"), default="gcn")
    parser.add_argument("--epochs", type=int, default=60)
    parser.add_argument("--workspace", default=None,
                        help="keep artifacts here instead of a temp dir")
    args = parser.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        workspace = Path(args.workspace) if args.workspace else Path(tmp) / "ws"
        cohort_dir = Path(tmp) / "cohort"
        manifest = make_cohort(cohort_dir, args.accessions, args.variants)
        print(f"cohort: {len(manifest.accessions)} accessions x "
              f"{args.variants} variants")

        bench = Workbench(workspace)
        summary = bench.enrich(manifest.vcf_paths, manifest.cadd_paths,
                               [manifest.metadata_path])
        print(f"enriched: {summary['quads_added']} quads "
              f"({summary['store']['graph_count']} named graphs)")

        sixty_plus = bench.accessions(min_age=50)
        print(f"accessions with age >= 50: {sixty_plus}")

        table_id, table = bench.fetch(
            accession_ids=manifest.accessions,
            features=["position", "quality", "ref_genome", "ann_split_1",
                      "phred_score"],
        )
        print(f"fetched table {table_id}: {len(table.rows)} rows")

        recipe = GraphRecipe(
            feature_columns=("position", "quality", "ref_genome"),
            label_column="phred_score",
            gene_column="ann_split_1",
            standardize=True,
        )
        graph_id, graph_summary = bench.build_graph(table_id, recipe)
        print(f"graph {graph_id}: {graph_summary['num_nodes']} nodes, "
              f"{graph_summary['num_edges']} edges, "
              f"{graph_summary['num_classes']} classes")

        config = ModelConfig(model_kind=args.model, epochs=args.epochs,
                             learning_rate=0.05, seed=1)
        checkpoint_id, report = bench.train(
            graph_id, config,
            telemetry=lambda e: print(
                f"  epoch {e.epoch:3d}  train={e.train_loss:.4f}  "
                f"val={e.val_loss:.4f}  acc={e.val_accuracy:.3f}")
            if e.epoch % 10 == 0 else None,
        )
        print(f"checkpoint {checkpoint_id}: final val_acc "
              f"{report.val_accuracy[-1]:.3f}")

        metrics = bench.inference(checkpoint_id, graph_id)
        print(f"test accuracy: {metrics.accuracy:.3f}")
        print("confusion matrix (rows = true):")
        for row in metrics.confusion.tolist():
            print("  " + " ".join(f"{c:4d}" for c in row))


if __name__ == "__main__":
    main()
