# spectrum/tasks.py

from celery import shared_task
import logging

logger = logging.getLogger(__name__)


@shared_task
def screen_wave_vectors(matrix, xi, periods, gammas, steps):
    """
    Decay profiles for one chunk of wave vectors.
    Arguments and results are plain lists so the chunk can travel to a worker.
    """
    from spectrum.services.criterion import CriterionService

    profiles = [
        CriterionService.criterion_profile(matrix, xi, periods, gamma, steps).as_dict()
        for gamma in gammas
    ]

    decaying = sum(profile["verdict"] == "decays" for profile in profiles)
    if decaying:
        logger.info(f"{decaying} of {len(profiles)} wave vectors decay")

    return profiles
