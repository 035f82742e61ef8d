SECRET_KEY = "conetool-tests"

INSTALLED_APPS = [
    "conetool",
]

DATABASES = {}

USE_TZ = True
