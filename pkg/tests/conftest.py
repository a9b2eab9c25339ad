import pytest

from hlpnet.files import data_path, load_environment, load_robots, load_spec


@pytest.fixture(scope="session")
def case_env():
    return load_environment(data_path("environment.json"))


@pytest.fixture(scope="session")
def case_robots(case_env):
    return load_robots(data_path("robots.json"), case_env)


@pytest.fixture(scope="session")
def case_spec(case_env, case_robots):
    return load_spec(data_path("mission.json"), case_env, case_robots)


@pytest.fixture(scope="session")
def case_study(case_env, case_robots, case_spec):
    return case_env, case_robots, case_spec


@pytest.fixture(scope="session")
def two_robot_case():
    env = load_environment(data_path("environment_2robots.json"))
    robots = load_robots(data_path("robots_2robots.json"), env)
    spec = load_spec(data_path("mission.json"), env, robots)
    return env, robots, spec


@pytest.fixture(scope="session")
def fig2_spec(case_env):
    return load_spec(data_path("eventually_b3.json"), case_env)
