"""
src/publish_data.py — Report publishing for the CLI commands.

Every report is a list of row dicts turned into a pandas DataFrame and
written twice: an aligned text table (`<stem>.txt`, also returned for the
console) and machine-readable rows (`<stem>.csv`). With png=True the same
table is rendered through matplotlib by create_mpl_table(), and selection
runs also get a score trajectory chart. Column schemas are listed in
docs/FORMATS.md.
"""
import logging
import os

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import pandas as pd

logger = logging.getLogger(__name__)

UNDEFINED = 'undefined'

SCORE_COLUMNS = ['metric', 'value']
COUNT_COLUMNS = ['category', 'correct', 'predicted', 'gold', 'precision', 'recall', 'f1']
PRUNING_COLUMNS = ['scheme', 'sentences', 'predicates', 'pairs_before', 'pairs_predicates', 'pairs_full',
                   'pairs_after', 'reduction_pct', 'reduction_vs_full_pct', 'gold_arguments', 'covered_arguments',
                   'coverage_pct']
HISTORY_COLUMNS = ['iteration', 'templates', 'score']
COUNTER_COLUMNS = ['counter', 'value']
IMPORTANCE_COLUMNS = ['rank', 'template', 'importance']
TRAIN_COLUMNS = ['field', 'value']


def report_frame(rows, columns):
    df = pd.DataFrame(rows)
    # Ensure all requested columns exist
    for col in columns:
        if col not in df.columns:
            df[col] = None
    return df[columns]


def create_mpl_table(data, columns, output_dir, filename, footer_text=None,
                     fig_width=8, save_padding=0.1, decimals=2):
    """
    Render ``data`` (a list of row dicts) as a table image and save it to
    output_dir/filename. Figure height follows the row count so the PNG
    crops tightly.
    """
    if not data:
        logger.warning("No data provided for %s", filename)
        return None

    os.makedirs(output_dir, exist_ok=True)
    df = report_frame(data, columns)

    row_height = 0.5
    header_height = 0.8
    padding = 0.5
    fig_height = (len(df) * row_height) + header_height + padding

    fig, ax = plt.subplots(figsize=(fig_width, fig_height))
    ax.axis('tight')
    ax.axis('off')

    cell_text = []
    for row in df.itertuples(index=False):
        formatted_row = []
        for cell in row:
            if cell is None or (isinstance(cell, float) and pd.isna(cell)):
                formatted_row.append(UNDEFINED)
            elif isinstance(cell, float):
                formatted_row.append(f"{cell:,.{decimals}f}")
            elif isinstance(cell, int) and not isinstance(cell, bool):
                formatted_row.append(f"{cell:,}")
            else:
                formatted_row.append(str(cell))
        cell_text.append(formatted_row)

    table = ax.table(
        cellText=cell_text,
        colLabels=columns,
        loc='center',
        cellLoc='center',
        colColours=['#e6e6e6'] * len(columns)
    )
    table.auto_set_font_size(False)
    table.set_fontsize(10)
    table.scale(1.2, 1.8)

    if footer_text:
        fig.text(0.5, 0.02, footer_text, ha='center', fontsize=8, color='gray')

    save_path = os.path.join(output_dir, filename)
    plt.savefig(save_path, bbox_inches='tight', pad_inches=save_padding, dpi=150)
    plt.close(fig)
    logger.info("Saved image: %s", save_path)
    return save_path


def format_table(rows, columns, decimals=4):
    df = report_frame(rows, columns)
    if df.empty:
        return '(no rows)'
    return df.to_string(index=False, na_rep=UNDEFINED, float_format=lambda v: f"{v:.{decimals}f}")


def publish_table(rows, columns, output_dir, stem, png=False, footer_text=None):
    """Write `<stem>.txt` and `<stem>.csv` (plus `<stem>.png` on request); return the text table."""
    os.makedirs(output_dir, exist_ok=True)
    text = format_table(rows, columns)
    with open(os.path.join(output_dir, f"{stem}.txt"), 'w', encoding='utf-8') as f:
        f.write(text + '\n')
    report_frame(rows, columns).to_csv(os.path.join(output_dir, f"{stem}.csv"), index=False)
    if png:
        create_mpl_table(rows, columns, output_dir, f"{stem}.png", footer_text=footer_text,
                         fig_width=max(6, 1.3 * len(columns)))
    return text


def plot_selection_history(report, output_dir, filename='selection_scores.png'):
    """Dev score after each accepted selection iteration, with set sizes annotated."""
    rows = report.to_rows()
    if not rows:
        return None
    df = pd.DataFrame(rows)
    fig, ax = plt.subplots(figsize=(8, 5))
    ax.plot(df['iteration'], df['score'], marker='o', linewidth=2.0, color='#1f77b4')
    for row in df.itertuples(index=False):
        ax.annotate(f"{row.templates}", (row.iteration, row.score), textcoords="offset points",
                    xytext=(0, 8), ha='center', fontsize=8)
    ax.set_title('Development score per selection iteration')
    ax.set_xlabel('Iteration')
    ax.set_ylabel('Sem-F1')
    ax.grid(True, linestyle='--', alpha=0.5)
    os.makedirs(output_dir, exist_ok=True)
    path = os.path.join(output_dir, filename)
    fig.savefig(path, bbox_inches='tight', dpi=150)
    plt.close(fig)
    logger.info("Saved chart: %s", path)
    return path


def publish_score_report(report, output_dir, stem='evaluation', png=False):
    scores = publish_table(report.to_rows(), SCORE_COLUMNS, output_dir, stem, png=png,
                           footer_text="values in percent; undefined where the gold side is empty")
    counts = publish_table(report.count_rows(), COUNT_COLUMNS, output_dir, f"{stem}_counts", png=png)
    return f"{scores}\n\n{counts}"


def publish_pruning_stats(stats, output_dir, stem='pruning', png=False):
    return publish_table([s.to_row() for s in stats], PRUNING_COLUMNS, output_dir, stem, png=png)


def publish_selection_report(report, output_dir, stem='selection', png=False):
    parts = [
        publish_table(report.to_rows(), HISTORY_COLUMNS, output_dir, f"{stem}_history", png=png),
        publish_table(report.counter_rows(), COUNTER_COLUMNS, output_dir, f"{stem}_counters", png=png),
        publish_table(report.importance_rows(), IMPORTANCE_COLUMNS, output_dir, f"{stem}_importance",
                      png=png),
    ]
    if png:
        plot_selection_history(report, output_dir, f"{stem}_scores.png")
    return '\n\n'.join(parts)


def publish_train_report(model, n_samples, output_dir, stem='train', png=False):
    rows = [
        {'field': 'samples', 'value': n_samples},
        {'field': 'labels', 'value': len(model.labels)},
        {'field': 'features', 'value': len(model.index)},
        {'field': 'iterations', 'value': model.iterations},
        {'field': 'objective', 'value': model.objective},
        {'field': 'converged', 'value': model.converged},
        {'field': 'sigma2', 'value': model.sigma2},
    ]
    return publish_table(rows, TRAIN_COLUMNS, output_dir, stem, png=png)
