import pytest

from services.synthetic_user_service import SyntheticUserSpec, default_population, generate_synthetic_user


@pytest.fixture(scope='session')
def population():
    """Four office-hours users over three weeks, differing in their domains"""
    return [generate_synthetic_user(spec) for spec in default_population(4, seed=11, days=21)]


@pytest.fixture(scope='session')
def office_user():
    """One user active 9-17 every day for eight weeks"""
    spec = SyntheticUserSpec(
        user_id='office',
        processes={'c:/apps/browser.exe': 0.7, 'c:/apps/editor.exe': 0.5},
        domains={'mail.example': 0.4, 'wiki.example': 0.3},
        days=56,
        seed=5,
    )
    return generate_synthetic_user(spec)


@pytest.fixture
def tmp_out(tmp_path):
    out = tmp_path / 'out'
    out.mkdir()
    return out
