"""
URL configuration for the neurodsp project.

Only two surfaces exist: the Django admin (experiment-run audit) and the
experiment-run REST API.
"""
from django.contrib import admin
from django.urls import path, include

urlpatterns = [
    path('admin/', admin.site.urls),

    # Experiment runs (list / detail / launch)
    path('', include('experiments.urls')),
]
