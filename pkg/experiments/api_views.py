import logging

from rest_framework.decorators import api_view, permission_classes
from rest_framework.permissions import IsAuthenticated
from rest_framework.response import Response

from .config import ExperimentError, load_config
from .models import ExperimentRun
from .report_utils import emit_report
from .services import run_experiment

logger = logging.getLogger(__name__)


def _summary(run):
    return {
        "id": run.pk,
        "created_at": run.created_at.isoformat(),
        "seed": run.seed,
        "models": run.model_set.split(','),
        "mse_table": run.mse_table,
        "result_hash": run.result_hash,
    }


# =====================================================
# API: EXPERIMENT RUNS (list / launch)
# =====================================================
@api_view(["GET", "POST"])
@permission_classes([IsAuthenticated])
def runs_api(request):
    """
    GET lists persisted runs; POST runs an experiment with the JSON body as
    config overrides (same keys as the config file) and stores it.
    """
    if request.method == "GET":
        runs = ExperimentRun.objects.all()
        return Response({"status": "success", "runs": [_summary(run) for run in runs]})

    overrides = request.data
    if not hasattr(overrides, "items"):
        return Response({"status": "error", "message": "Body must be a JSON object"}, status=400)
    if "fir_coeffs" in overrides:
        return Response({"status": "error", "message": "fir_coeffs is not accepted over the API"}, status=400)

    try:
        cfg = load_config(overrides=dict(overrides.items()))
        result = run_experiment(cfg)
    except ExperimentError as exc:
        return Response({"status": "error", "message": str(exc)}, status=400)

    run = ExperimentRun.record(result, emit_report(result), user=request.user)
    logger.info("stored run %s for %s (%s)", run.pk, request.user.username, run.result_hash)
    return Response({"status": "success", **_summary(run)}, status=201)


# =====================================================
# API: EXPERIMENT RUN DETAIL
# =====================================================
@api_view(["GET"])
@permission_classes([IsAuthenticated])
def run_detail_api(request, run_id):
    try:
        run = ExperimentRun.objects.get(id=run_id)
    except ExperimentRun.DoesNotExist:
        return Response({"status": "error", "message": "Run not found"}, status=404)

    return Response({
        "status": "success",
        **_summary(run),
        "config": run.config,
        "report": run.report,
    })
