'''
test_ui.py: tests of the taudnn user interface object
'''

from taudnn.styled import Styled, styled
from taudnn.ui import UI, inform, warn


def test_singleton():
    first = UI(use_color = False)
    assert UI() is first
    assert UI.instance() is first


def test_settings_apply_on_every_call(capsys):
    UI(use_color = False, be_quiet = True)
    inform('hidden {}', 1)
    warn('shown {}', 2)
    assert capsys.readouterr().out == 'shown 2\n'
    UI(use_color = False, be_quiet = False)
    inform('visible {}', 3)
    assert capsys.readouterr().out == 'visible 3\n'


def test_default_instance(capsys):
    inform('plain')
    assert capsys.readouterr().out == 'plain\n'


def test_styles():
    plain = Styled(use_color = False)
    assert plain.fatal_text('broke {}', 'down') == 'FATAL: broke down'
    assert plain.progress_text('step {:>3}', 7) == 'step   7'
    for style in ['info', 'progress', 'warn', 'error', 'fatal']:
        assert 'text' in str(styled('text', style))
