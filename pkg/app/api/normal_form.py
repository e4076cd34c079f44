import argparse
from pathlib import Path
import logging

from app.api.instance_file import load_instance
from app.api.output import EXIT_OK, emit_line, format_vertices
from app.models.digraph import build_digraph
from app.services.idua_service import extremal_vertices, run_idua, rural_hospitals_report
from app.services.reduction_service import split_firms

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "normal-form",
        help="Reduce the matching digraph and print its surviving vertices and extremal matchings",
    )
    parser.add_argument("file", help="instance file")
    parser.add_argument("--dot", metavar="OUT", help="write the reduced digraph in DOT format to OUT")
    parser.set_defaults(handler=run)


def _names(items) -> str:
    return " ".join(items) if items else "-"


def run(args: argparse.Namespace) -> int:
    instance, _ = load_instance(args.file)
    split = split_firms(instance)
    nf = run_idua(build_digraph(split))
    digraph = nf.digraph

    emit_line(f"r: {nf.r}")
    emit_line(f"vertices: {digraph.live_count}")
    for r in range(digraph.rows):
        columns = digraph.row_live(r)
        emit_line(f"  {split.row_label(r)}: {_names([split.column_label(c) for c in columns])}")
    m_w, m_f = extremal_vertices(digraph)
    emit_line(f"worker-optimal: {format_vertices(split, m_w)}")
    emit_line(f"firm-optimal: {format_vertices(split, m_f)}")

    report = rural_hospitals_report(nf, split)
    emit_line(f"never employed: {_names(report.never_employed)}")
    emit_line(f"never filled: {_names(report.never_filled)}")
    emit_line(f"always filled: {_names(report.always_filled)}")
    emit_line(f"underfilled firms: {_names(report.underfilled_firms)}")
    emit_line(f"fixed pairs: {_names([f'{w}:{f}' for w, f in report.fixed_pairs])}")
    emit_line(f"fixed firms: {_names(report.fixed_firms)}")

    if args.dot:
        Path(args.dot).write_text(digraph.to_dot(split).source, encoding="utf-8")
        logger.info(f"Wrote DOT digraph to {args.dot}")
    return EXIT_OK
