from setuptools import setup, find_packages
setup(
    name='fflab',
    version='0.1',
    packages=find_packages(include=['fflab*']),
    package_data={'fflab': ['data/*.json']},
    author='fflab developers',
    install_requires=['numpy', 'sympy', 'tqdm', 'networkx'],
    extras_require={'tests': ['pytest']},
    entry_points={'console_scripts': ['fflab=fflab.verify_cli:main']}
)
