"""
Servicio de reportes: agregación entre semillas, tests pareados y datos para figuras
"""

import logging
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.stats import binomtest

from legato.models.metric import MetricReport, SignTestResult
from legato.models.trace import ExecutionTrace
from legato.utils.exceptions import NoTracesError, UndefinedMetricError

logger = logging.getLogger(__name__)

METRIC_COLUMNS = [
    "nsparc",
    "nldlj",
    "overlap_rmse",
    "overlap_rmse_x1e3",
    "delay_overlap_rmse",
    "mode_switches",
    "completion_steps",
]


class ReportService:

    @staticmethod
    def metrics_frame(reports: Iterable[MetricReport]) -> pd.DataFrame:
        """Una fila por traza: estrategia, schedule, semilla y métricas"""
        rows = []
        for report in reports:
            schedule = report.config.schedule
            rows.append({
                "task": report.task.value,
                "strategy": report.config.strategy.value,
                "schedule": schedule.label,
                "d": schedule.d,
                "s": schedule.s,
                "r": schedule.r,
                "seed": report.seed,
                "nsparc": report.nsparc,
                "nldlj": report.nldlj,
                "overlap_rmse": report.overlap_rmse,
                "overlap_rmse_x1e3": report.overlap_rmse_x1e3,
                "delay_overlap_rmse": report.delay_overlap_rmse,
                "mode_switches": report.mode_switches,
                "completion_steps": report.completion_steps,
            })
        if not rows:
            raise NoTracesError("no hay reportes de métricas para agregar")
        frame = pd.DataFrame(rows)
        frame[METRIC_COLUMNS] = frame[METRIC_COLUMNS].astype(float)
        return frame.sort_values(["strategy", "schedule", "seed"], kind="mergesort").reset_index(drop=True)

    @staticmethod
    def aggregate(frame: pd.DataFrame, group_by: Sequence[str] = ("strategy", "schedule")) -> pd.DataFrame:
        """
        Formato largo: una fila por (grupo, métrica) con n, media y error estándar.
        SE = std(ddof=1) / sqrt(n); ausente con n = 1. Los valores ausentes no cuentan en n.
        """
        rows = []
        for keys, group in frame.groupby(list(group_by), sort=True):
            keys = keys if isinstance(keys, tuple) else (keys,)
            for metric in METRIC_COLUMNS:
                values = group[metric].dropna()
                n = int(values.size)
                row = dict(zip(group_by, keys))
                row.update({
                    "metric": metric,
                    "n": n,
                    "mean": float(values.mean()) if n else np.nan,
                    "se": float(values.std(ddof=1) / np.sqrt(n)) if n > 1 else np.nan,
                })
                rows.append(row)
        return pd.DataFrame(rows)

    @staticmethod
    def paired_sign_test(
        frame: pd.DataFrame,
        metric: str,
        better: str,
        baseline: str,
    ) -> SignTestResult:
        """
        Test de signo unilateral pareado por (schedule, semilla):
        H1 = `better` obtiene un valor menor que `baseline` con más frecuencia.
        """
        if metric not in frame.columns:
            raise UndefinedMetricError(f"métrica desconocida: {metric}")

        left = frame[frame["strategy"] == better].set_index(["schedule", "seed"])[metric]
        right = frame[frame["strategy"] == baseline].set_index(["schedule", "seed"])[metric]
        paired = pd.concat([left.rename("better"), right.rename("baseline")], axis=1, join="inner").dropna()

        wins = int((paired["better"] < paired["baseline"]).sum())
        losses = int((paired["better"] > paired["baseline"]).sum())
        ties = int(len(paired) - wins - losses)
        decided = wins + losses
        p_value = float(binomtest(wins, decided, 0.5, alternative="greater").pvalue) if decided else 1.0

        return SignTestResult(
            metric=metric,
            better=better,
            baseline=baseline,
            wins=wins,
            losses=losses,
            ties=ties,
            p_value=p_value,
        )

    @staticmethod
    def sign_tests(frame: pd.DataFrame, better: str = "legato") -> pd.DataFrame:
        """Tests de signo de `better` contra cada otra estrategia presente"""
        rows = []
        for baseline in sorted(set(frame["strategy"]) - {better}):
            if better not in set(frame["strategy"]):
                break
            for metric in ("overlap_rmse", "mode_switches", "nsparc", "nldlj", "completion_steps"):
                result = ReportService.paired_sign_test(frame, metric, better, baseline)
                rows.append(result.model_dump())
        return pd.DataFrame(rows)

    @staticmethod
    def drift_frame(traces: Iterable[ExecutionTrace]) -> pd.DataFrame:
        """
        Serie de drift por paso de denoising (datos de la figura de drift):
        media y SE entre todos los ciclos guiados de todas las semillas.
        """
        samples: Dict[tuple, List[float]] = {}
        for trace in traces:
            key_base = (trace.config.strategy.value, trace.config.schedule.label)
            for cycle in trace.cycles:
                for step, value in enumerate(cycle.drift):
                    samples.setdefault(key_base + (step,), []).append(value)

        rows = []
        for (strategy, schedule, step), values in sorted(samples.items()):
            series = pd.Series(values, dtype=float)
            n = int(series.size)
            rows.append({
                "strategy": strategy,
                "schedule": schedule,
                "step": step,
                "n": n,
                "mean": float(series.mean()),
                "se": float(series.std(ddof=1) / np.sqrt(n)) if n > 1 else np.nan,
            })
        return pd.DataFrame(rows, columns=["strategy", "schedule", "step", "n", "mean", "se"])

    @staticmethod
    def ablation_frame(frame: pd.DataFrame, kind: str) -> pd.DataFrame:
        """Tabla de la ablación: una fila por (estrategia, valor del parámetro barrido)"""
        swept = "s" if kind == "stride" else "d"
        summary = ReportService.aggregate(frame, group_by=("strategy", swept))
        table = summary.pivot_table(
            index=["strategy", swept], columns="metric", values="mean", dropna=False
        ).reset_index()
        table.columns.name = None
        ascending = kind != "stride"
        return table.sort_values(["strategy", swept], ascending=[True, ascending], kind="mergesort").reset_index(drop=True)

    @staticmethod
    def overlap_trend_is_monotone(ablation: pd.DataFrame, strategy: str) -> Optional[bool]:
        """¿El overlap RMSE no crece al achicar s? (tabla de stride, s descendente)"""
        rows = ablation[ablation["strategy"] == strategy]
        if len(rows) < 2:
            return None
        values = rows["overlap_rmse"].to_numpy()
        return bool(np.all(np.diff(values) <= 0.0))
