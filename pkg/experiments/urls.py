from django.urls import path

from .api_views import run_detail_api, runs_api

urlpatterns = [
    path("api/runs/", runs_api, name="runs_api"),
    path("api/runs/<int:run_id>/", run_detail_api, name="run_detail_api"),
]
